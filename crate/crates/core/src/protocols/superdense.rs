//! Exhaustive search for dense coding through one shared two-gbit state.

use serde::{Deserialize, Serialize};

use crate::boxes::{local_relabel, pr_state};
use crate::dynamics::Relabelling;
use crate::error::Result;
use crate::rational::Vector;
use crate::state::StateVector;
use crate::system::Party;

use super::{pure_gbit, MeasurementStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdcSearch {
    pub encodings: usize,
    pub distinct_states: usize,
    pub strategies: usize,
    pub four_subsets_checked: u64,
    pub four_distinguishable: bool,
    pub max_distinguishable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperdenseReport {
    pub pr: SdcSearch,
    pub product: SdcSearch,
}

fn support(dist: &[crate::rational::Rational]) -> u8 {
    dist.iter()
        .enumerate()
        .filter(|(_, p)| !num_traits::Zero::is_zero(*p))
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Largest family of pairwise disjoint masks.
fn max_disjoint(masks: &[u8]) -> usize {
    let mut distinct: Vec<u8> = masks.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let n = distinct.len();
    let mut best = 0;
    for pick in 0u32..1 << n {
        let mut used = 0u8;
        let mut ok = true;
        for (i, &m) in distinct.iter().enumerate() {
            if pick >> i & 1 == 1 {
                ok &= used & m == 0;
                used |= m;
            }
        }
        if ok {
            best = best.max(pick.count_ones() as usize);
        }
    }
    best
}

/// Alice relabels her half of `shared` in each of the 64 deterministic ways
/// and sends it; Bob measures both gbits with a canonical strategy.
pub fn superdense_search(shared: &StateVector) -> Result<SdcSearch> {
    let rels = Relabelling::all(Party::GBIT);
    let id = Relabelling::identity(Party::GBIT);
    let mut states: Vec<Vector> = rels
        .iter()
        .map(|r| local_relabel(&shared.system, &[r, &id], &shared.entries))
        .collect::<Result<_>>()?;
    let encodings = states.len();
    states.sort();
    states.dedup();
    let strategies = MeasurementStrategy::all_bipartite();
    let mut checked = 0u64;
    let mut four = false;
    let mut best = 0;
    for s in &strategies {
        let masks: Vec<u8> = states
            .iter()
            .map(|v| {
                let st = StateVector {
                    system: shared.system.clone(),
                    entries: v.clone(),
                };
                s.distribution(&st).map(|d| support(&d))
            })
            .collect::<Result<_>>()?;
        let n = masks.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        checked += 1;
                        let quad = [masks[i], masks[j], masks[k], masks[l]];
                        let total = quad.iter().fold(0u8, |a, &m| a | m);
                        if quad.iter().map(|m| m.count_ones()).sum::<u32>() == total.count_ones() {
                            four = true;
                        }
                    }
                }
            }
        }
        best = best.max(max_disjoint(&masks));
    }
    Ok(SdcSearch {
        encodings,
        distinct_states: states.len(),
        strategies: strategies.len(),
        four_subsets_checked: checked,
        four_distinguishable: four,
        max_distinguishable: best,
    })
}

/// Searches with a shared PR box and with a product of pure gbits.
pub fn no_superdense_search() -> Result<SuperdenseReport> {
    let product = pure_gbit([0, 0]).tensor(&pure_gbit([0, 0]))?;
    Ok(SuperdenseReport {
        pr: superdense_search(&pr_state())?,
        product: superdense_search(&product)?,
    })
}
