//! Information-processing protocols on gbits and PR boxes.

mod kd;
mod memory;
mod ot;
mod superdense;
mod teleport;
mod vandam;

pub use kd::{
    detection_probability, detection_probability_by_branches, disturbed_pair, run_key_distribution,
    EveStrategy, KdVerdict,
};
pub use memory::{memory_recall, memory_recall_probability, memory_store, MemoryVerdict};
pub use ot::{oblivious_transfer_audit, run_oblivious_transfer, OtAudit, OtVerdict};
pub use superdense::{no_superdense_search, superdense_search, SdcSearch, SuperdenseReport};
pub use teleport::{
    exact_mixture_forces_branches, no_teleportation_search, TeleportationReport, MIXTURE_LEMMA,
};
pub use vandam::{
    anf, run_van_dam, van_dam_exhaustive, TruthTable, VanDamAudit, VanDamPlan, VanDamVerdict,
};

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::rational::{Rational, Vector};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Success,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Success
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub party: String,
    pub action: String,
    pub value: usize,
}

impl Round {
    pub fn new(party: &str, action: impl Into<String>, value: usize) -> Self {
        Round {
            party: party.to_string(),
            action: action.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTranscript<V> {
    pub seed: u64,
    pub rounds: Vec<Round>,
    pub verdict: V,
}

/// Draws an index from exact probabilities.
pub fn sample_index<R: Rng>(probs: &[Rational], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        acc += p.to_f64().unwrap_or(0.0);
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// A shared multi-party state whose systems are measured at most once each.
/// Measuring a system collapses the others to their conditional state.
#[derive(Debug, Clone)]
pub struct SharedBox {
    state: Option<StateVector>,
    /// Original labels of the systems still unmeasured, in state order.
    live: Vec<usize>,
    size: usize,
}

impl SharedBox {
    pub fn new(state: StateVector) -> Result<Self> {
        state.check_no_signalling()?;
        let n = state.system.party_count();
        Ok(SharedBox {
            state: Some(state),
            live: (0..n).collect(),
            size: n,
        })
    }

    pub fn unmeasured(&self) -> &[usize] {
        &self.live
    }

    /// Normalized state of the systems not yet measured.
    pub fn remaining(&self) -> Option<StateVector> {
        let s = self.state.as_ref()?;
        let c = s.norm().ok()?;
        Some(s.scale(&(Rational::from_integer(1.into()) / c)))
    }

    pub fn measure<R: Rng>(&mut self, system: usize, x: usize, rng: &mut R) -> Result<usize> {
        if system >= self.size {
            return Err(GptError::InvalidSystem(format!("no system {system}")));
        }
        let Some(pos) = self.live.iter().position(|&s| s == system) else {
            return Err(GptError::BoxReused(system));
        };
        let state = self.state.take().expect("unmeasured systems remain");
        let norm = state.norm()?;
        let probs: Vector = state
            .outcome_probabilities(pos, x)?
            .iter()
            .map(|p| p / &norm)
            .collect();
        let a = sample_index(&probs, rng);
        self.live.remove(pos);
        if !self.live.is_empty() {
            self.state = Some(state.condition(pos, x, a)?);
        }
        Ok(a)
    }
}

/// Canonical two-system measurement: measure `first_fiducial` on
/// `first_system`, then on the other system the fiducial chosen by the first
/// outcome, and report `outcome_map[2a' + b']`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementStrategy {
    pub first_system: usize,
    pub first_fiducial: usize,
    pub second_fiducial: [usize; 2],
    pub outcome_map: [usize; 4],
}

/// One outcome pair of a canonical measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub first: usize,
    pub second: usize,
    pub probability: Rational,
    /// Unnormalized state of the unmeasured systems, if any remain.
    pub rest: Option<StateVector>,
}

impl MeasurementStrategy {
    /// All sixteen strategies on two gbits that report both outcomes.
    pub fn all_bipartite() -> Vec<MeasurementStrategy> {
        let mut out = Vec::with_capacity(16);
        for first_system in 0..2 {
            for first_fiducial in 0..2 {
                for g0 in 0..2 {
                    for g1 in 0..2 {
                        out.push(MeasurementStrategy {
                            first_system,
                            first_fiducial,
                            second_fiducial: [g0, g1],
                            outcome_map: [0, 1, 2, 3],
                        });
                    }
                }
            }
        }
        out
    }

    /// Exact branches when the measured pair sits at state positions
    /// `systems` (first system taken from `systems[first_system]`).
    pub fn branches(&self, state: &StateVector, systems: [usize; 2]) -> Result<Vec<Branch>> {
        let first = systems[self.first_system];
        let mut second = systems[1 - self.first_system];
        if second > first {
            second -= 1;
        }
        let mut out = Vec::with_capacity(4);
        for a in 0..2 {
            let after = state.condition(first, self.first_fiducial, a)?;
            let y = self.second_fiducial[a];
            for b in 0..2 {
                let (probability, rest) = if after.system.party_count() == 1 {
                    (after.entries[y * 2 + b].clone(), None)
                } else {
                    let r = after.condition(second, y, b)?;
                    (r.norm()?, Some(r))
                };
                out.push(Branch {
                    first: a,
                    second: b,
                    probability,
                    rest,
                });
            }
        }
        Ok(out)
    }

    /// Distribution over reported labels on a two-system state.
    pub fn distribution(&self, state: &StateVector) -> Result<Vector> {
        let mut dist = vec![Rational::zero(); 4];
        for br in self.branches(state, [0, 1])? {
            dist[self.outcome_map[2 * br.first + br.second]] += br.probability;
        }
        Ok(dist)
    }
}

/// Deterministic gbit state assigning `outcomes[x]` to fiducial `x`.
pub fn pure_gbit(outcomes: [usize; 2]) -> StateVector {
    StateVector::deterministic(crate::system::SystemType::gbit(), &[outcomes.to_vec()])
        .expect("gbit outcomes are binary")
}

/// Parses a bit string given in hexadecimal: bit `i` is the coefficient of
/// `2^i` in the number the string denotes.
pub fn bits_from_hex(hex: &str, len: usize) -> Result<Vec<bool>> {
    let digits: Vec<u32> = hex
        .trim()
        .trim_start_matches("0x")
        .chars()
        .filter(|c| *c != '_')
        .map(|c| {
            c.to_digit(16)
                .ok_or_else(|| GptError::Parse(format!("bad hex digit {c:?}")))
        })
        .collect::<Result<_>>()?;
    let mut bits = vec![false; len];
    for (k, d) in digits.iter().rev().enumerate() {
        for j in 0..4 {
            if d >> j & 1 == 1 {
                let i = 4 * k + j;
                if i >= len {
                    return Err(GptError::Parse(format!(
                        "hex table has more than {len} bits"
                    )));
                }
                bits[i] = true;
            }
        }
    }
    Ok(bits)
}

pub fn bits_to_hex(bits: &[bool]) -> String {
    let n = bits.len().div_ceil(4).max(1);
    (0..n)
        .rev()
        .map(|k| {
            let d = (0..4).fold(0u32, |acc, j| {
                acc | (u32::from(*bits.get(4 * k + j).unwrap_or(&false)) << j)
            });
            char::from_digit(d, 16).expect("nibble")
        })
        .collect()
}
