//! Storing `2^n` bits in `n` gbits through parity-constrained correlations.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::rational::{rat, Rational};
use crate::state::StateVector;
use crate::system::{SystemType, Theory};

use super::{ProtocolTranscript, Round, SharedBox};

pub const MAX_MEMORY_GBITS: usize = 6;

/// Fiducial choices for address `i`: gbit `j` measures bit `n − 1 − j`.
fn address(i: usize, n: usize) -> Vec<usize> {
    (0..n).map(|j| i >> (n - 1 - j) & 1).collect()
}

/// `P(a|X) = 1/2^{n−1}` when `⊕ a_j = f(X)`, else 0.
pub fn memory_store(table: &[bool], n: usize) -> Result<StateVector> {
    if n == 0 || n > MAX_MEMORY_GBITS {
        return Err(GptError::TooLarge(format!(
            "{n} gbits (1 to {MAX_MEMORY_GBITS} supported)"
        )));
    }
    if table.len() != 1 << n {
        return Err(GptError::DimensionMismatch {
            expected: 1 << n,
            found: table.len(),
        });
    }
    let t = SystemType::gbits(Theory::Gnst, n);
    let weight = rat(1, 1 << (n - 1));
    let mut entries = vec![Rational::zero(); t.dim()];
    for (i, &bit) in table.iter().enumerate() {
        let xs = address(i, n);
        for outs in t.outcome_tuples() {
            let parity = outs.iter().fold(0, |p, a| p ^ a) == 1;
            if parity == bit {
                entries[t.index(&xs, &outs)] = weight.clone();
            }
        }
    }
    Ok(StateVector { system: t, entries })
}

/// Exact probability that recalling address `i` yields `bit`.
pub fn memory_recall_probability(state: &StateVector, i: usize, bit: bool) -> Rational {
    let t = &state.system;
    let xs = address(i, t.party_count());
    t.outcome_tuples()
        .into_iter()
        .filter(|outs| (outs.iter().fold(0, |p, a| p ^ a) == 1) == bit)
        .map(|outs| state.entries[t.index(&xs, &outs)].clone())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryVerdict {
    pub address: usize,
    pub recalled: bool,
}

/// Measures each gbit on its address bit, one after another, and returns
/// the parity of the outcomes.
pub fn memory_recall(
    state: &StateVector,
    i: usize,
    seed: u64,
) -> Result<ProtocolTranscript<MemoryVerdict>> {
    let n = state.system.party_count();
    if i >> n != 0 {
        return Err(GptError::Parse(format!(
            "address {i} needs more than {n} bits"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mem = SharedBox::new(state.clone())?;
    let mut rounds = Vec::with_capacity(n);
    let mut parity = 0;
    for (j, x) in address(i, n).into_iter().enumerate() {
        let a = mem.measure(j, x, &mut rng)?;
        rounds.push(Round::new(
            &format!("gbit{}", j + 1),
            format!("measure x{}", x + 1),
            a,
        ));
        parity ^= a;
    }
    Ok(ProtocolTranscript {
        seed,
        rounds,
        verdict: MemoryVerdict {
            address: i,
            recalled: parity == 1,
        },
    })
}
