//! Exact toolkit for generalized probabilistic theories: state spaces as
//! polytopes of probability vectors, admissible dynamics, no-signalling boxes
//! and the information-processing protocols built on them.

pub mod boxes;
pub mod circuits;
pub mod dd;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod protocols;
pub mod qubit;
pub mod rational;
pub mod space;
pub mod state;
pub mod system;

pub use error::{GptError, Result};
pub use rational::{Rational, Vector};
pub use state::{Effect, StateVector};
pub use system::{Party, SystemType, Theory};
