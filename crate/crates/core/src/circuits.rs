//! Circuits of constant-arity gates with a final first-fiducial readout, a
//! sampling simulator for GLT and an exact brute-force evaluator.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Relabelling, Transformation};
use crate::error::{GptError, Result};
use crate::linalg::Matrix;
use crate::lp::lexmin_convex_weights;
use crate::rational::{rat, Rational, Vector};
use crate::state::{kron_vec, StateVector};
use crate::system::{tuples, Party, SystemType, Theory};

pub const MAX_ARITY: usize = 4;
pub const MAX_BRUTE_FORCE_ENTRIES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub targets: Vec<usize>,
    pub transformation: Transformation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub theory: Theory,
    pub party: Party,
    /// Initial local deterministic state: per system, one outcome per
    /// fiducial measurement.
    pub initial: Vec<Vec<usize>>,
    pub gates: Vec<Gate>,
}

/// A gate's map given inline or as a path to a transformation file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransformationSource {
    Path(String),
    Inline(Transformation),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateSpec {
    pub targets: Vec<usize>,
    pub transformation: TransformationSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitFile {
    pub theory: Theory,
    #[serde(default = "gbit_party")]
    pub party: Party,
    pub initial: Vec<Vec<usize>>,
    #[serde(default)]
    pub gates: Vec<GateSpec>,
}

fn gbit_party() -> Party {
    Party::GBIT
}

impl Circuit {
    pub fn new(
        theory: Theory,
        party: Party,
        initial: Vec<Vec<usize>>,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        let c = Circuit {
            theory,
            party,
            initial,
            gates,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn n_systems(&self) -> usize {
        self.initial.len()
    }

    pub fn system(&self) -> SystemType {
        SystemType {
            theory: self.theory,
            parties: vec![self.party; self.n_systems()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theory == Theory::Qubit {
            return Err(GptError::Unsupported("circuits of qubits".into()));
        }
        if self.initial.is_empty() {
            return Err(GptError::InvalidSystem(
                "a circuit needs at least one system".into(),
            ));
        }
        for a in &self.initial {
            if a.len() != self.party.measurements || a.iter().any(|&o| o >= self.party.outcomes) {
                return Err(GptError::MalformedState(format!(
                    "bad initial assignment {a:?}"
                )));
            }
        }
        let n = self.n_systems();
        for (g, gate) in self.gates.iter().enumerate() {
            let k = gate.targets.len();
            if k == 0 || k > MAX_ARITY {
                return Err(GptError::Unsupported(format!(
                    "gate {g} has arity {k} (1 to {MAX_ARITY} supported)"
                )));
            }
            let mut seen = vec![false; n];
            for &t in &gate.targets {
                if t >= n || std::mem::replace(&mut seen[t], true) {
                    return Err(GptError::InvalidSystem(format!(
                        "gate {g} targets {:?}",
                        gate.targets
                    )));
                }
            }
            if gate.transformation.system.parties != vec![self.party; k] {
                return Err(GptError::TheoryMismatch(format!(
                    "gate {g} acts on {}",
                    gate.transformation.system
                )));
            }
        }
        Ok(())
    }

    /// Loads a circuit file; gate paths are relative to the file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GptError::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Circuit::from_json(&text, base)
    }

    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let file: CircuitFile =
            serde_json::from_str(text).map_err(|e| GptError::Parse(e.to_string()))?;
        let gates = file
            .gates
            .into_iter()
            .map(|g| {
                let transformation = match g.transformation {
                    TransformationSource::Inline(t) => t,
                    TransformationSource::Path(p) => {
                        let full = base.join(&p);
                        let text = std::fs::read_to_string(&full)
                            .map_err(|e| GptError::Parse(format!("{}: {e}", full.display())))?;
                        serde_json::from_str(&text)
                            .map_err(|e| GptError::Parse(format!("{}: {e}", full.display())))?
                    }
                };
                Ok(Gate {
                    targets: g.targets,
                    transformation,
                })
            })
            .collect::<Result<_>>()?;
        Circuit::new(file.theory, file.party, file.initial, gates)
    }
}

/// One outcome per fiducial measurement of every system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalDeterministicState {
    pub assignments: Vec<Vec<usize>>,
}

impl LocalDeterministicState {
    pub fn vector(&self, party: Party) -> Vector {
        self.assignments
            .iter()
            .fold(vec![Rational::one()], |acc, a| {
                let mut v = vec![Rational::zero(); party.dim()];
                for (x, &o) in a.iter().enumerate() {
                    v[x * party.outcomes + o] = Rational::one();
                }
                kron_vec(&acc, &v)
            })
    }

    /// Outcomes of the first fiducial measurement.
    pub fn readout(&self) -> Vec<usize> {
        self.assignments.iter().map(|a| a[0]).collect()
    }
}

/// All local deterministic states of `k` systems, ordered by their vectors.
fn ld_states(party: Party, k: usize) -> Vec<(LocalDeterministicState, Vector)> {
    let singles = tuples(&vec![party.outcomes; party.measurements]);
    let mut out: Vec<(LocalDeterministicState, Vector)> = tuples(&vec![singles.len(); k])
        .into_iter()
        .map(|pick| {
            let s = LocalDeterministicState {
                assignments: pick.into_iter().map(|i| singles[i].clone()).collect(),
            };
            let v = s.vector(party);
            (s, v)
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

/// Exact convex decomposition of a gate's image of one local deterministic
/// input.
#[derive(Debug, Clone, PartialEq)]
pub struct GateBranching {
    pub weights: Vec<Rational>,
    pub outputs: Vec<LocalDeterministicState>,
    cumulative: Vec<f64>,
}

impl GateBranching {
    pub fn reconstruct(&self, party: Party) -> Vector {
        let mut acc: Option<Vector> = None;
        for (w, s) in self.weights.iter().zip(&self.outputs) {
            let v: Vector = s.vector(party).iter().map(|x| x * w).collect();
            acc = Some(match acc {
                None => v,
                Some(a) => a.iter().zip(&v).map(|(x, y)| x + y).collect(),
            });
        }
        acc.unwrap_or_default()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> &LocalDeterministicState {
        let u: f64 = rng.gen();
        let i = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.outputs.len() - 1);
        &self.outputs[i]
    }
}

/// Tracks one local deterministic state per shot and replaces the targets'
/// assignments by a sample from each gate's decomposition.
pub struct GltSimulator<'a> {
    circuit: &'a Circuit,
    local: Vec<Vec<(LocalDeterministicState, Vector)>>,
    cache: HashMap<(usize, LocalDeterministicState), GateBranching>,
}

impl<'a> GltSimulator<'a> {
    pub fn new(circuit: &'a Circuit) -> Result<Self> {
        circuit.validate()?;
        if !matches!(circuit.theory, Theory::Glt | Theory::Classical) {
            return Err(GptError::Unsupported(
                "only GLT circuits are sampled; use the brute-force distribution otherwise".into(),
            ));
        }
        Ok(GltSimulator {
            circuit,
            local: vec![Vec::new(); MAX_ARITY + 1],
            cache: HashMap::new(),
        })
    }

    fn ld_for(&mut self, k: usize) -> &[(LocalDeterministicState, Vector)] {
        if self.local[k].is_empty() {
            self.local[k] = ld_states(self.circuit.party, k);
        }
        &self.local[k]
    }

    /// Decomposition of gate `g` on the given input, computed once.
    pub fn branching(
        &mut self,
        g: usize,
        input: &LocalDeterministicState,
    ) -> Result<&GateBranching> {
        let key = (g, input.clone());
        if !self.cache.contains_key(&key) {
            let party = self.circuit.party;
            let gate = &self.circuit.gates[g];
            let image = gate.transformation.matrix.mul_vec(&input.vector(party))?;
            let k = gate.targets.len();
            let points: Vec<(LocalDeterministicState, Vector)> = self.ld_for(k).to_vec();
            let vecs: Vec<Vector> = points.iter().map(|p| p.1.clone()).collect();
            let weights = lexmin_convex_weights(&vecs, &image)?.ok_or_else(|| {
                GptError::NotGltAdmissible {
                    gate: g,
                    reason: format!(
                        "image of local deterministic input {:?} is outside the GLT set",
                        input.assignments
                    ),
                }
            })?;
            let mut b = GateBranching {
                weights: Vec::new(),
                outputs: Vec::new(),
                cumulative: Vec::new(),
            };
            let mut acc = 0.0;
            for (w, p) in weights.into_iter().zip(points) {
                if w.is_zero() {
                    continue;
                }
                acc += w.to_f64().unwrap_or(0.0);
                b.cumulative.push(acc);
                b.weights.push(w);
                b.outputs.push(p.0);
            }
            self.cache.insert(key.clone(), b);
        }
        Ok(&self.cache[&key])
    }

    /// Runs one shot; the returned value is the only state the shot kept.
    pub fn shot<R: Rng>(&mut self, rng: &mut R) -> Result<LocalDeterministicState> {
        let mut state = LocalDeterministicState {
            assignments: self.circuit.initial.clone(),
        };
        for g in 0..self.circuit.gates.len() {
            let targets = self.circuit.gates[g].targets.clone();
            let input = LocalDeterministicState {
                assignments: targets
                    .iter()
                    .map(|&t| state.assignments[t].clone())
                    .collect(),
            };
            let out = self.branching(g, &input)?.sample(rng).clone();
            for (t, a) in targets.into_iter().zip(out.assignments) {
                state.assignments[t] = a;
            }
        }
        Ok(state)
    }
}

pub type Histogram = BTreeMap<Vec<usize>, u64>;
pub type Distribution = BTreeMap<Vec<usize>, Rational>;

pub fn simulate_glt(c: &Circuit, seed: u64, shots: u64) -> Result<Histogram> {
    let mut sim = GltSimulator::new(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = Histogram::new();
    for _ in 0..shots {
        *hist.entry(sim.shot(&mut rng)?.readout()).or_insert(0) += 1;
    }
    Ok(hist)
}

/// `M` applied to the listed systems of a state vector, without forming the
/// full matrix.
pub fn apply_on_targets(
    entries: &[Rational],
    system: &SystemType,
    targets: &[usize],
    m: &Matrix,
) -> Result<Vector> {
    let dims: Vec<usize> = system.parties.iter().map(Party::dim).collect();
    let n = dims.len();
    let mut strides = vec![1; n];
    for p in (0..n.saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * dims[p + 1];
    }
    let gdims: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
    let gdim: usize = gdims.iter().product();
    if m.rows() != gdim || m.cols() != gdim {
        return Err(GptError::DimensionMismatch {
            expected: gdim,
            found: m.rows(),
        });
    }
    let offsets: Vec<usize> = (0..gdim)
        .map(|mut g| {
            let mut off = 0;
            for j in (0..targets.len()).rev() {
                off += (g % gdims[j]) * strides[targets[j]];
                g /= gdims[j];
            }
            off
        })
        .collect();
    let columns: Vec<Vec<(usize, Rational)>> = (0..gdim)
        .map(|c| {
            (0..gdim)
                .filter(|&r| !m.get(r, c).is_zero())
                .map(|r| (r, m.get(r, c).clone()))
                .collect()
        })
        .collect();
    let mut out = vec![Rational::zero(); entries.len()];
    for (i, v) in entries.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let mut g = 0;
        for &t in targets {
            g = g * dims[t] + (i / strides[t]) % dims[t];
        }
        let base = i - offsets[g];
        for (r, w) in &columns[g] {
            out[base + offsets[*r]] += w * v;
        }
    }
    Ok(out)
}

/// Final state vector of a circuit by exact matrix action.
pub fn brute_force_state(c: &Circuit) -> Result<StateVector> {
    c.validate()?;
    let system = c.system();
    let dim = system
        .parties
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(p.dim()));
    if dim.is_none_or(|d| d > MAX_BRUTE_FORCE_ENTRIES) {
        return Err(GptError::TooLarge(format!(
            "{} systems exceed {MAX_BRUTE_FORCE_ENTRIES} state entries",
            c.n_systems()
        )));
    }
    let mut entries = LocalDeterministicState {
        assignments: c.initial.clone(),
    }
    .vector(c.party);
    for g in &c.gates {
        entries = apply_on_targets(&entries, &system, &g.targets, &g.transformation.matrix)?;
    }
    Ok(StateVector { system, entries })
}

/// Exact distribution of the final first-fiducial outcomes.
pub fn brute_force_distribution(c: &Circuit) -> Result<Distribution> {
    let state = brute_force_state(c)?;
    let system = &state.system;
    let first = vec![0; c.n_systems()];
    let mut dist = Distribution::new();
    for outs in system.outcome_tuples() {
        let p = &state.entries[system.index(&first, &outs)];
        if !p.is_zero() {
            dist.insert(outs, p.clone());
        }
    }
    Ok(dist)
}

pub fn total_variation(hist: &Histogram, exact: &Distribution) -> f64 {
    let shots: u64 = hist.values().sum();
    let mut keys: Vec<&Vec<usize>> = hist.keys().chain(exact.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let p = exact.get(k).and_then(ToPrimitive::to_f64).unwrap_or(0.0);
            let q = hist.get(k).copied().unwrap_or(0) as f64 / shots.max(1) as f64;
            (p - q).abs()
        })
        .sum::<f64>()
}

/// Matrix sending the systems of a `k`-fold composite to new slots:
/// system `j` moves to slot `perm[j]`.
pub fn permutation_matrix(party: Party, perm: &[usize]) -> Matrix {
    let k = perm.len();
    let d = party.dim();
    let total = d.pow(k as u32);
    let mut m = Matrix::zeros(total, total);
    for i in 0..total {
        let mut digits = vec![0; k];
        let mut r = i;
        for j in (0..k).rev() {
            digits[j] = r % d;
            r /= d;
        }
        let mut moved = vec![0; k];
        for j in 0..k {
            moved[perm[j]] = digits[j];
        }
        let o = moved.iter().fold(0, |acc, &x| acc * d + x);
        m.set(o, i, Rational::one());
    }
    m
}

/// A random GLT-admissible gate: a convex mixture of system permutations
/// composed with products of deterministic local relabellings.
pub fn random_glt_gate<R: Rng>(
    rng: &mut R,
    party: Party,
    arity: usize,
    theory: Theory,
) -> Result<Transformation> {
    let rels = Relabelling::all(party);
    let terms = rng.gen_range(1..=3);
    let raw: Vec<i64> = (0..terms).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    let d = party.dim().pow(arity as u32);
    let mut m = Matrix::zeros(d, d);
    for w in raw {
        let mut local = Matrix::identity(1);
        for _ in 0..arity {
            local = local.kron(&rels.choose(rng).expect("relabellings").matrix());
        }
        let mut perm: Vec<usize> = (0..arity).collect();
        perm.shuffle(rng);
        let term = permutation_matrix(party, &perm).mul(&local)?;
        m = m.add(&term.scale(&rat(w, total)))?;
    }
    Transformation::new(SystemType::new(theory, vec![party; arity])?, m)
}

/// A random circuit of GLT-admissible gates of arity at most `max_arity`.
pub fn random_glt_circuit<R: Rng>(
    rng: &mut R,
    n_systems: usize,
    n_gates: usize,
    max_arity: usize,
) -> Result<Circuit> {
    let party = Party::GBIT;
    let initial = (0..n_systems)
        .map(|_| {
            (0..party.measurements)
                .map(|_| rng.gen_range(0..party.outcomes))
                .collect()
        })
        .collect();
    let mut gates = Vec::with_capacity(n_gates);
    for _ in 0..n_gates {
        let arity = rng.gen_range(1..=max_arity.min(n_systems).min(MAX_ARITY));
        let mut all: Vec<usize> = (0..n_systems).collect();
        all.shuffle(rng);
        let targets = all[..arity].to_vec();
        gates.push(Gate {
            targets,
            transformation: random_glt_gate(rng, party, arity, Theory::Glt)?,
        });
    }
    Circuit::new(Theory::Glt, party, initial, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::embed;

    #[test]
    fn targeted_application_matches_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let system = SystemType::gbits(Theory::Glt, 3);
        let gate = random_glt_gate(&mut rng, Party::GBIT, 2, Theory::Glt).unwrap();
        let v = LocalDeterministicState {
            assignments: vec![vec![0, 1], vec![1, 1], vec![1, 0]],
        }
        .vector(Party::GBIT);
        let full = embed(&gate.matrix, &system, &[2, 0]).unwrap();
        assert_eq!(
            apply_on_targets(&v, &system, &[2, 0], &gate.matrix).unwrap(),
            full.mul_vec(&v).unwrap()
        );
    }

    #[test]
    fn empty_circuit_reads_first_fiducials() {
        let c = Circuit::new(
            Theory::Glt,
            Party::GBIT,
            vec![vec![0, 1], vec![1, 0]],
            Vec::new(),
        )
        .unwrap();
        let dist = brute_force_distribution(&c).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[&vec![0, 1]], Rational::one());
        let hist = simulate_glt(&c, 1, 100).unwrap();
        assert_eq!(hist[&vec![0, 1]], 100);
    }
}
