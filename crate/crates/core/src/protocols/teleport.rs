//! Exhaustive search for teleportation of a gbit through one PR box.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::boxes::pr_state;
use crate::dynamics::Relabelling;
use crate::error::Result;
use crate::rational::{Rational, Vector};
use crate::space::vertices;
use crate::state::StateVector;
use crate::system::{Party, SystemType};

use super::{pure_gbit, MeasurementStrategy, Verdict};

pub const MIXTURE_LEMMA: &str = "every pure target is an extreme point of the state set, so a convex mixture of \
     protocol branches reproduces it only if each branch of positive weight reproduces it; deterministic \
     strategies therefore suffice";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeleportationReport {
    pub alice_strategies: usize,
    pub corrections_per_message: usize,
    /// (strategy, message, correction) triples examined.
    pub checks: usize,
    pub successful_strategies: usize,
    pub verdict: Verdict,
    /// Alice is told the state and sends its two fiducial outcomes.
    pub known_state: Verdict,
    /// Unknown state, two classical bits and no shared box.
    pub no_box: Verdict,
    pub lemma: String,
}

/// A message is served by a correction when, for every input that can
/// produce it, the corrected normalized state equals the input.
fn message_corrected(
    outcomes: &[(Vector, StateVector)],
    corrections: &[Relabelling],
) -> (bool, usize) {
    let live: Vec<(&Vector, StateVector)> = outcomes
        .iter()
        .filter_map(|(p, s)| {
            let c = s.norm().ok()?;
            (!c.is_zero()).then(|| (p, s.scale(&(Rational::one() / c))))
        })
        .collect();
    if live.is_empty() {
        return (true, 0);
    }
    let mut checks = 0;
    for r in corrections {
        checks += 1;
        if live.iter().all(|(p, s)| r.apply(&s.entries) == **p) {
            return (true, checks);
        }
    }
    (false, checks)
}

/// Runs every deterministic two-step measurement by Alice on (input gbit,
/// her half of a PR box) and every relabelling correction by Bob.
pub fn no_teleportation_search() -> Result<TeleportationReport> {
    let inputs = vertices(&SystemType::gbit())?;
    let corrections = Relabelling::all(Party::GBIT);
    let strategies = MeasurementStrategy::all_bipartite();
    let pr = pr_state();
    let mut checks = 0;
    let mut successful = 0;
    for strat in &strategies {
        let mut per_message: Vec<Vec<(Vector, StateVector)>> = vec![Vec::new(); 4];
        for p in &inputs {
            let joint = StateVector {
                system: SystemType::gbit(),
                entries: p.clone(),
            }
            .tensor(&pr)?;
            for br in strat.branches(&joint, [0, 1])? {
                let bob = br.rest.expect("Bob's half remains");
                per_message[2 * br.first + br.second].push((p.clone(), bob));
            }
        }
        let mut ok = true;
        for outcomes in &per_message {
            let (served, n) = message_corrected(outcomes, &corrections);
            checks += n;
            ok &= served;
        }
        if ok {
            successful += 1;
        }
    }

    // Known state: the two fiducial outcomes are sent and Bob prepares them.
    let known = inputs.iter().all(|p| {
        let bits = [usize::from(p[1].is_one()), usize::from(p[3].is_one())];
        pure_gbit(bits).entries == *p
    });

    // No box: Alice reads one fiducial of the input, Bob relabels a blank gbit.
    let blank = pure_gbit([0, 0]);
    let mut no_box = false;
    for x in 0..2 {
        let mut per_message: Vec<Vec<(Vector, StateVector)>> = vec![Vec::new(); 2];
        for p in &inputs {
            for a in 0..2 {
                let weight = p[2 * x + a].clone();
                per_message[a].push((p.clone(), blank.scale(&weight)));
            }
        }
        // Bob's state carries no information, so a correction must map the
        // blank onto every input sharing the message.
        let served = per_message
            .iter()
            .all(|outs| message_corrected(outs, &corrections).0);
        no_box |= served;
    }

    Ok(TeleportationReport {
        alice_strategies: strategies.len(),
        corrections_per_message: corrections.len(),
        checks,
        successful_strategies: successful,
        verdict: Verdict::from_bool(successful > 0),
        known_state: Verdict::from_bool(known),
        no_box: Verdict::from_bool(no_box),
        lemma: MIXTURE_LEMMA.to_string(),
    })
}

/// Whether a mixture equal to `target` forces every positive-weight branch
/// to equal `target`. Returns true when the mixture differs from `target`.
pub fn exact_mixture_forces_branches(target: &[Rational], branches: &[(Rational, Vector)]) -> bool {
    let mut mix = vec![Rational::zero(); target.len()];
    for (w, v) in branches {
        for (m, x) in mix.iter_mut().zip(v) {
            *m += w * x;
        }
    }
    if mix != target {
        return true;
    }
    branches
        .iter()
        .filter(|(w, _)| !w.is_zero())
        .all(|(_, v)| v == target)
}
