//! Key distribution from shared PR boxes with CHSH spot checks.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::{chsh_value, monogamy_lp, pr_state};
use crate::error::{GptError, Result};
use crate::rational::{rat, serde_opt_rational, serde_rational, Rational};
use crate::state::StateVector;

use super::{pure_gbit, ProtocolTranscript, Round, SharedBox};

/// Intercept-resend attack on Bob's half: measure fiducial `measurement`,
/// report `outcome_map[b]`, and resend the pure gbit `resend[e]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EveStrategy {
    pub measurement: usize,
    pub outcome_map: [usize; 2],
    pub resend: [[usize; 2]; 2],
}

impl EveStrategy {
    /// Measure `measurement` and resend the pure state whose fiducials both
    /// show the observed outcome.
    pub fn intercept(measurement: usize) -> Self {
        EveStrategy {
            measurement,
            outcome_map: [0, 1],
            resend: [[0, 0], [1, 1]],
        }
    }

    pub fn all() -> Vec<EveStrategy> {
        let mut out = Vec::new();
        for measurement in 0..2 {
            for f in 0..4 {
                for r in 0..16 {
                    out.push(EveStrategy {
                        measurement,
                        outcome_map: [f & 1, f >> 1 & 1],
                        resend: [[r & 1, r >> 1 & 1], [r >> 2 & 1, r >> 3 & 1]],
                    });
                }
            }
        }
        out
    }
}

/// `x1`, `x2`, optionally followed by `:f0f1` and `:r00r01r10r11` bits.
impl FromStr for EveStrategy {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GptError::Parse(format!("bad Eve strategy {s:?}"));
        let mut parts = s.split(':');
        let measurement = match parts.next() {
            Some("x1") => 0,
            Some("x2") => 1,
            _ => return Err(bad()),
        };
        let mut eve = EveStrategy::intercept(measurement);
        let bits = |p: &str, n: usize| -> Result<Vec<usize>> {
            let v: Vec<usize> = p
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect::<Result<_>>()?;
            if v.len() == n {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        if let Some(p) = parts.next() {
            let f = bits(p, 2)?;
            eve.outcome_map = [f[0], f[1]];
        }
        if let Some(p) = parts.next() {
            let r = bits(p, 4)?;
            eve.resend = [[r[0], r[1]], [r[2], r[3]]];
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(eve)
    }
}

impl fmt::Display for EveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x{}:{}{}:{}{}{}{}",
            self.measurement + 1,
            self.outcome_map[0],
            self.outcome_map[1],
            self.resend[0][0],
            self.resend[0][1],
            self.resend[1][0],
            self.resend[1][1]
        )
    }
}

/// The pair state after the attack, summed over Eve's outcomes.
pub fn disturbed_pair(eve: Option<&EveStrategy>) -> Result<StateVector> {
    let pr = pr_state();
    let Some(eve) = eve else { return Ok(pr) };
    let mut entries = vec![Rational::zero(); pr.entries.len()];
    for b in 0..2 {
        let alice = pr.condition(1, eve.measurement, b)?;
        let q = pure_gbit(eve.resend[eve.outcome_map[b]]);
        for (e, x) in entries.iter_mut().zip(alice.tensor(&q)?.entries) {
            *e += x;
        }
    }
    Ok(StateVector {
        system: pr.system,
        entries,
    })
}

/// Chance that a tested pair fails `a ⊕ b = x·y` with uniform settings.
pub fn detection_probability(eve: Option<&EveStrategy>) -> Result<Rational> {
    Ok(Rational::one() - chsh_value(&disturbed_pair(eve)?)? / rat(4, 1))
}

/// The same quantity averaged branch by branch over Eve's outcomes.
pub fn detection_probability_by_branches(eve: &EveStrategy) -> Result<Rational> {
    let pr = pr_state();
    let mut total = Rational::zero();
    for b in 0..2 {
        let alice = pr.condition(1, eve.measurement, b)?;
        let weight = alice.norm()?;
        if weight.is_zero() {
            continue;
        }
        let branch = alice
            .scale(&(Rational::one() / &weight))
            .tensor(&pure_gbit(eve.resend[eve.outcome_map[b]]))?;
        let mut fails = Rational::zero();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for bb in 0..2 {
                        if (a ^ bb) != (x & y) {
                            fails += branch.get(&[x, y], &[a, bb]);
                        }
                    }
                }
            }
        }
        total += weight * fails / rat(4, 1);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KdVerdict {
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    pub keys_match: bool,
    pub tested_pairs: usize,
    pub detected_pairs: usize,
    #[serde(with = "serde_rational")]
    pub detection_probability: Rational,
    /// Eve's best correlation with an undisturbed pair, from the monogamy LP.
    #[serde(with = "serde_opt_rational")]
    pub monogamy_bound: Option<Rational>,
    pub eve: Option<String>,
}

pub fn run_key_distribution(
    n_pairs: usize,
    test_fraction: f64,
    eve: Option<&EveStrategy>,
    seed: u64,
) -> Result<ProtocolTranscript<KdVerdict>> {
    if n_pairs < 2 {
        return Err(GptError::InsufficientPairs {
            required: 2,
            found: n_pairs,
        });
    }
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(GptError::Parse(format!(
            "test fraction {test_fraction} is not in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds = Vec::new();
    let (mut alice_key, mut bob_key) = (Vec::new(), Vec::new());
    let (mut tested, mut detected) = (0, 0);
    for _ in 0..n_pairs {
        let mut pair = SharedBox::new(pr_state())?;
        if let Some(e) = eve {
            let b = pair.measure(1, e.measurement, &mut rng)?;
            let reported = e.outcome_map[b];
            rounds.push(Round::new(
                "eve",
                format!("measure x{}", e.measurement + 1),
                b,
            ));
            rounds.push(Round::new("eve", "resend", reported));
            let alice = pair.remaining().expect("Alice's half is unmeasured");
            pair = SharedBox::new(alice.tensor(&pure_gbit(e.resend[reported]))?)?;
        }
        if rng.gen_bool(test_fraction) {
            let (x, y) = (rng.gen_range(0..2), rng.gen_range(0..2));
            let a = pair.measure(0, x, &mut rng)?;
            let b = pair.measure(1, y, &mut rng)?;
            rounds.push(Round::new("alice", format!("test x{}", x + 1), a));
            rounds.push(Round::new("bob", format!("test x{}", y + 1), b));
            tested += 1;
            if (a ^ b) != (x & y) {
                detected += 1;
            }
        } else {
            let a = pair.measure(0, 0, &mut rng)?;
            let b = pair.measure(1, 0, &mut rng)?;
            rounds.push(Round::new("alice", "key x1", a));
            rounds.push(Round::new("bob", "key x1", b));
            alice_key.push(a as u8);
            bob_key.push(b as u8);
        }
    }
    let monogamy_bound = match eve {
        None => Some(monogamy_lp(&pr_state())?.optimum),
        Some(_) => None,
    };
    Ok(ProtocolTranscript {
        seed,
        rounds,
        verdict: KdVerdict {
            keys_match: alice_key == bob_key,
            alice_key,
            bob_key,
            tested_pairs: tested,
            detected_pairs: detected,
            detection_probability: detection_probability(eve)?,
            monogamy_bound,
            eve: eve.map(ToString::to_string),
        },
    })
}
