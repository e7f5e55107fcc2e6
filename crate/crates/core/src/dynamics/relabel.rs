//! Relabellings of fiducial measurements and outcomes, and the block
//! decomposition of admissible single-system maps.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::linalg::{nullspace, Matrix};
use crate::lp::{lexmin_convex_weights, solve_lp, LpStatus, Sense};
use crate::polytope::HRep;
use crate::rational::{dot, serde_rational, Rational, Vector};
use crate::space::vertices;
use crate::state::{Effect, StateVector};
use crate::system::{tuples, Party, SystemType, Theory};

use super::Transformation;

/// Deterministic relabelling: output measurement `X` is input measurement
/// `measurement_map[X]` with outcome `a'` reported as `outcome_maps[X][a']`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relabelling {
    pub party: Party,
    pub measurement_map: Vec<usize>,
    pub outcome_maps: Vec<Vec<usize>>,
}

impl Relabelling {
    pub fn identity(party: Party) -> Self {
        Relabelling {
            party,
            measurement_map: (0..party.measurements).collect(),
            outcome_maps: vec![(0..party.outcomes).collect(); party.measurements],
        }
    }

    /// Every deterministic relabelling of one party, in lexicographic order
    /// (64 for a gbit).
    pub fn all(party: Party) -> Vec<Relabelling> {
        let (n, k) = (party.measurements, party.outcomes);
        let f1s = tuples(&vec![n; n]);
        let single = tuples(&vec![k; k]);
        let f2s = tuples(&vec![single.len(); n]);
        let mut out = Vec::with_capacity(f1s.len() * f2s.len());
        for f1 in &f1s {
            for f2 in &f2s {
                out.push(Relabelling {
                    party,
                    measurement_map: f1.clone(),
                    outcome_maps: f2.iter().map(|&i| single[i].clone()).collect(),
                });
            }
        }
        out
    }

    pub fn is_reversible(&self) -> bool {
        let perm = |v: &[usize], n: usize| {
            let mut seen = vec![false; n];
            v.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
        };
        perm(&self.measurement_map, self.party.measurements)
            && self
                .outcome_maps
                .iter()
                .all(|m| perm(m, self.party.outcomes))
    }

    pub fn matrix(&self) -> Matrix {
        let k = self.party.outcomes;
        let d = self.party.dim();
        let mut m = Matrix::zeros(d, d);
        for (x, &src) in self.measurement_map.iter().enumerate() {
            for (a_in, &a_out) in self.outcome_maps[x].iter().enumerate() {
                m.set(x * k + a_out, src * k + a_in, Rational::one());
            }
        }
        m
    }

    /// Action on a single-party vector without building the matrix.
    pub fn apply(&self, v: &[Rational]) -> Vector {
        let k = self.party.outcomes;
        let mut out = vec![Rational::zero(); self.party.dim()];
        for (x, &src) in self.measurement_map.iter().enumerate() {
            for (a_in, &a_out) in self.outcome_maps[x].iter().enumerate() {
                let val = &v[src * k + a_in];
                if !val.is_zero() {
                    out[x * k + a_out] += val;
                }
            }
        }
        out
    }

    /// Index map of the relabelling: output index ← list of input indices.
    pub fn sources(&self) -> Vec<Vec<usize>> {
        let k = self.party.outcomes;
        let mut src = vec![Vec::new(); self.party.dim()];
        for (x, &from) in self.measurement_map.iter().enumerate() {
            for (a_in, &a_out) in self.outcome_maps[x].iter().enumerate() {
                src[x * k + a_out].push(from * k + a_in);
            }
        }
        src
    }
}

/// Replaces `r` by an entrywise nonnegative effect agreeing with it on every
/// pure state, by moving along directions that vanish on the state set.
pub fn canonicalize_effect(r: &Effect) -> Result<Effect> {
    if r.system.theory == Theory::Qubit {
        return Err(GptError::Unsupported(
            "qubit effects are not canonicalized".into(),
        ));
    }
    let verts = vertices(&r.system)?;
    if r.entries.len() != r.system.dim() {
        return Err(GptError::DimensionMismatch {
            expected: r.system.dim(),
            found: r.entries.len(),
        });
    }
    for v in &verts {
        if dot(&r.entries, v).is_negative() {
            return Err(GptError::NotAnEffect("negative on a pure state".into()));
        }
    }
    if r.entries.iter().all(|x| !x.is_negative()) {
        return Ok(r.clone());
    }
    let d = r.system.dim();
    let dirs = nullspace(&verts, d);
    let m = dirs.len();
    let mut h = HRep::new(m);
    for i in 0..d {
        let row: Vector = dirs.iter().map(|dj| dj[i].clone()).collect();
        h.push_inequality(row, -r.entries[i].clone());
    }
    let objective: Vector = dirs.iter().map(|dj| dj.iter().sum()).collect();
    let res = solve_lp(&objective, &h, Sense::Minimize)?;
    if res.status != LpStatus::Optimal {
        return Err(GptError::NotAnEffect("no nonnegative equivalent".into()));
    }
    let mut out = r.entries.clone();
    for (mu, dj) in res.witness.iter().zip(&dirs) {
        if mu.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(dj) {
            *o += mu * x;
        }
    }
    Ok(Effect {
        system: r.system.clone(),
        entries: out,
    })
}

/// One term `weight · M_F` of a decomposition: output measurement `X` reads
/// input measurement `measurement_map[X]` through the stochastic matrix
/// `outcome_matrices[X]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabellingTerm {
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    pub measurement_map: Vec<usize>,
    pub outcome_matrices: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabellingDecomposition {
    pub system: SystemType,
    /// Entrywise nonnegative matrix equal to the input on the state set.
    pub canonical: Matrix,
    /// `α_ij`: weight with which output measurement `i` reads input `j`.
    pub alpha: Matrix,
    pub terms: Vec<RelabellingTerm>,
}

impl RelabellingDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let p = self.system.parties[0];
        let k = p.outcomes;
        let mut m = Matrix::zeros(p.dim(), p.dim());
        for term in &self.terms {
            for (x, &src) in term.measurement_map.iter().enumerate() {
                let s = &term.outcome_matrices[x];
                for a in 0..k {
                    for b in 0..k {
                        let v = s.get(a, b);
                        if !v.is_zero() {
                            let cur = m.get(x * k + a, src * k + b) + &term.weight * v;
                            m.set(x * k + a, src * k + b, cur);
                        }
                    }
                }
            }
        }
        m
    }

    pub fn has_zero_residual(&self) -> bool {
        self.reconstruct() == self.canonical
    }
}

fn single_party(t: &SystemType) -> Result<Party> {
    if !t.is_single() || t.theory == Theory::Qubit {
        return Err(GptError::Unsupported(
            "relabelling decompositions are defined for single rational systems".into(),
        ));
    }
    Ok(t.parties[0])
}

fn canonical_rows(system: &SystemType, rows: &[Vector]) -> Result<Vec<Vector>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let e = Effect {
                system: system.clone(),
                entries: row.clone(),
            };
            canonicalize_effect(&e)
                .map(|c| c.entries)
                .map_err(|err| GptError::NotAdmissible(format!("row {i} is not an effect: {err}")))
        })
        .collect()
}

/// Column sums of the `k`-column block `j` of `rows`, which must agree.
fn block_weight(rows: &[Vector], j: usize, k: usize) -> Option<Rational> {
    let sums: Vec<Rational> = (0..k)
        .map(|b| rows.iter().map(|r| r[j * k + b].clone()).sum())
        .collect();
    sums.iter().all(|s| *s == sums[0]).then(|| sums[0].clone())
}

/// Writes an admissible normalization-preserving single-system map as a
/// convex combination of measurement relabellings with stochastic outcome
/// maps, choosing the lexicographically smallest weight vector.
pub fn decompose_relabellings(t: &Transformation) -> Result<RelabellingDecomposition> {
    let party = single_party(&t.system)?;
    let (n, k) = (party.measurements, party.outcomes);
    if !t.is_normalization_preserving()? {
        return Err(GptError::NotAdmissible(
            "map does not preserve normalization".into(),
        ));
    }
    let rows = canonical_rows(&t.system, &t.matrix.to_rows())?;
    let canonical = Matrix::from_rows(rows.clone())?;
    let mut alpha = Matrix::zeros(n, n);
    let mut blocks = vec![vec![Matrix::identity(k); n]; n];
    for i in 0..n {
        let out_rows = &rows[i * k..(i + 1) * k];
        let mut total = Rational::zero();
        for j in 0..n {
            let a = block_weight(out_rows, j, k).ok_or_else(|| {
                GptError::NotAdmissible(format!(
                    "block ({i},{j}) is not a multiple of a stochastic matrix"
                ))
            })?;
            if a.is_positive() {
                blocks[i][j] = Matrix::from_fn(k, k, |r, c| &out_rows[r][j * k + c] / &a);
            }
            total += &a;
            alpha.set(i, j, a);
        }
        if !total.is_one() {
            return Err(GptError::NotAdmissible(format!(
                "block weights of output {i} sum to {total}"
            )));
        }
    }
    let maps = tuples(&vec![n; n]);
    let points: Vec<Vector> = maps
        .iter()
        .map(|f| {
            let mut v = vec![Rational::zero(); n * n];
            for (i, &j) in f.iter().enumerate() {
                v[i * n + j] = Rational::one();
            }
            v
        })
        .collect();
    let target: Vector = (0..n * n)
        .map(|idx| alpha.get(idx / n, idx % n).clone())
        .collect();
    let weights = lexmin_convex_weights(&points, &target)?.ok_or_else(|| {
        GptError::NotAdmissible("block weights admit no mixture of relabellings".into())
    })?;
    let terms = maps
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(f, w)| RelabellingTerm {
            weight: w,
            measurement_map: f.clone(),
            outcome_matrices: f
                .iter()
                .enumerate()
                .map(|(i, &j)| blocks[i][j].clone())
                .collect(),
        })
        .collect();
    let dec = RelabellingDecomposition {
        system: t.system.clone(),
        canonical,
        alpha,
        terms,
    };
    if !dec.has_zero_residual() {
        return Err(GptError::NotAdmissible(
            "reconstruction differs from the canonical matrix".into(),
        ));
    }
    Ok(dec)
}

/// Fiducial measurement `measurement` performed with probability `weight`,
/// its outcome `b` reported as outcome `r` with probability `post[r][b]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementTerm {
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    pub measurement: usize,
    pub post: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementDecomposition {
    pub system: SystemType,
    pub canonical: Matrix,
    pub terms: Vec<MeasurementTerm>,
}

impl MeasurementDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let p = self.system.parties[0];
        let k = p.outcomes;
        let mut m = Matrix::zeros(self.canonical.rows(), p.dim());
        for term in &self.terms {
            for r in 0..m.rows() {
                for b in 0..k {
                    let v = term.post.get(r, b);
                    if !v.is_zero() {
                        let cur = m.get(r, term.measurement * k + b) + &term.weight * v;
                        m.set(r, term.measurement * k + b, cur);
                    }
                }
            }
        }
        m
    }
}

/// Decomposes a complete measurement (stacked effect rows) on a single system
/// into a mixture of fiducial measurements followed by outcome processing.
pub fn decompose_measurement(
    system: &SystemType,
    effects: &[Vector],
) -> Result<MeasurementDecomposition> {
    let party = single_party(system)?;
    let (n, k) = (party.measurements, party.outcomes);
    for v in vertices(system)? {
        let total: Rational = effects.iter().map(|r| dot(r, &v)).sum();
        if !total.is_one() {
            return Err(GptError::NotAdmissible(
                "outcome probabilities do not sum to one".into(),
            ));
        }
    }
    let rows = canonical_rows(system, effects)?;
    let mut terms = Vec::new();
    let mut total = Rational::zero();
    for j in 0..n {
        let a = block_weight(&rows, j, k).ok_or_else(|| {
            GptError::NotAdmissible(format!(
                "block {j} is not a multiple of a stochastic matrix"
            ))
        })?;
        total += &a;
        if a.is_positive() {
            let post = Matrix::from_fn(rows.len(), k, |r, c| &rows[r][j * k + c] / &a);
            terms.push(MeasurementTerm {
                weight: a,
                measurement: j,
                post,
            });
        }
    }
    if !total.is_one() {
        return Err(GptError::NotAdmissible(format!(
            "block weights sum to {total}"
        )));
    }
    let dec = MeasurementDecomposition {
        system: system.clone(),
        canonical: Matrix::from_rows(rows)?,
        terms,
    };
    if dec.reconstruct() != dec.canonical {
        return Err(GptError::NotAdmissible(
            "reconstruction differs from the canonical rows".into(),
        ));
    }
    Ok(dec)
}

/// Probability vector of an outcome-processed measurement on a state.
pub fn measurement_distribution(dec: &MeasurementDecomposition, p: &StateVector) -> Result<Vector> {
    dec.canonical.mul_vec(&p.entries)
}
