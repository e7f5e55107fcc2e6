use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GptError {
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("region is unbounded")]
    Unbounded,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed state: {0}")]
    MalformedState(String),
    #[error("theory mismatch: {0}")]
    TheoryMismatch(String),
    #[error("state is signalling: {0}")]
    SignallingState(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("transformation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("not an effect: {0}")]
    NotAnEffect(String),
    #[error("marginal has no no-signalling extension")]
    InfeasibleMarginal,
    #[error("at least {required} pairs are required, got {found}")]
    InsufficientPairs { required: usize, found: usize },
    #[error("gate {gate} is not admissible in GLT: {reason}")]
    NotGltAdmissible { gate: usize, reason: String },
    #[error("system {0} of this box was already measured")]
    BoxReused(usize),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("invalid system type: {0}")]
    InvalidSystem(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GptError>;
