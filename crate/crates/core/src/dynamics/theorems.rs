//! Generic structure results: classicality, disturbance blocks, no-cloning.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::linalg::{independent_subset, nullspace, rank, solve_affine, Matrix};
use crate::lp::{solve_lp, FarkasCertificate, LpStatus, Sense};
use crate::polytope::{Constraint, HRep};
use crate::rational::{serde_rational, serde_vector, serde_vectors, Rational, Vector};
use crate::space::{cone_hrep, vertices};
use crate::state::kron_vec;
use crate::system::{SystemType, Theory};

fn rational_only(t: &SystemType) -> Result<()> {
    if t.theory == Theory::Qubit {
        return Err(GptError::Unsupported(
            "qubit systems are not polytopes".into(),
        ));
    }
    Ok(())
}

/// Affine dimension of a point set.
pub fn affine_dimension(points: &[Vector]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vector> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        rank(&diffs)
    }
}

/// The normalized state set is a simplex.
pub fn is_classical(t: &SystemType) -> Result<bool> {
    rational_only(t)?;
    let v = vertices(t)?;
    Ok(v.len() == affine_dimension(&v) + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Pure states forming a basis of the block's subspace.
    #[serde(with = "serde_vectors")]
    pub basis: Vec<Vector>,
    #[serde(with = "serde_vectors")]
    pub pure_states: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectSumDecomposition {
    pub system: SystemType,
    pub blocks: Vec<Block>,
    /// Dimension of the space of scalar profiles `(c_v)` of maps with
    /// `M·v = c_v·v` on every pure state.
    pub non_disturbing_dimension: usize,
    /// The profiles are exactly the block-constant ones.
    pub block_scalar: bool,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = i;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Splits the span of the state set into blocks linked by pure states with
/// overlapping expansions, and solves for every non-disturbing map.
pub fn disturbance_decomposition(t: &SystemType) -> Result<DirectSumDecomposition> {
    rational_only(t)?;
    let pure = vertices(t)?;
    let basis_idx = independent_subset(&pure);
    let m = basis_idx.len();
    let basis: Vec<Vector> = basis_idx.iter().map(|&i| pure[i].clone()).collect();
    let columns: Vec<Vector> = (0..t.dim())
        .map(|c| basis.iter().map(|b| b[c].clone()).collect())
        .collect();
    let mut coeffs = Vec::with_capacity(pure.len());
    for v in &pure {
        let sol = solve_affine(&columns, v, m)
            .map_err(|_| GptError::MalformedState("pure state outside span".into()))?;
        coeffs.push(sol.particular);
    }
    let mut parent: Vec<usize> = (0..m).collect();
    for d in &coeffs {
        let nz: Vec<usize> = (0..m).filter(|&j| !d[j].is_zero()).collect();
        for w in nz.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = (0..m).map(|j| find(&mut parent, j)).collect();
    let mut labels: Vec<usize> = roots.clone();
    labels.sort();
    labels.dedup();
    for r in roots.iter_mut() {
        *r = labels.binary_search(r).expect("root");
    }
    let mut blocks: Vec<Block> = labels
        .iter()
        .map(|_| Block {
            basis: Vec::new(),
            pure_states: Vec::new(),
        })
        .collect();
    for (j, &b) in roots.iter().enumerate() {
        blocks[b].basis.push(basis[j].clone());
    }
    for (v, d) in pure.iter().zip(&coeffs) {
        let j = (0..m).find(|&j| !d[j].is_zero()).expect("nonzero state");
        blocks[roots[j]].pure_states.push(v.clone());
    }

    // Unknowns: c_j for basis states, then c_v for the remaining pure states.
    // M v = Σ d_j c_j b_j must equal c_v Σ d_j b_j, so d_j (c_j − c_v) = 0.
    let others: Vec<usize> = (0..pure.len()).filter(|i| !basis_idx.contains(i)).collect();
    let unknowns = m + others.len();
    let mut rows = Vec::new();
    for (o, &vi) in others.iter().enumerate() {
        for j in 0..m {
            if coeffs[vi][j].is_zero() {
                continue;
            }
            let mut row = vec![Rational::zero(); unknowns];
            row[j] = Rational::one();
            row[m + o] = -Rational::one();
            rows.push(row);
        }
    }
    let sols = nullspace(&rows, unknowns);
    let profiles: Vec<Vector> = sols.iter().map(|s| s[..m].to_vec()).collect();
    let indicators: Vec<Vector> = (0..blocks.len())
        .map(|b| {
            roots
                .iter()
                .map(|&r| {
                    if r == b {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let dim = if profiles.is_empty() {
        0
    } else {
        rank(&profiles)
    };
    let mut joint = profiles.clone();
    joint.extend(indicators.iter().cloned());
    let block_scalar = dim == blocks.len() && rank(&joint) == blocks.len();
    Ok(DirectSumDecomposition {
        system: t.clone(),
        blocks,
        non_disturbing_dimension: dim,
        block_scalar,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloningVerdict {
    /// The blank state `Q` the copier starts from.
    #[serde(with = "serde_vector")]
    pub standard: Vector,
    pub deterministic_feasible: bool,
    pub certificate: Option<FarkasCertificate>,
    pub certificate_verified: bool,
    /// A cloning map when one exists.
    pub witness_map: Option<Matrix>,
    /// `max min_P c_P` over branches with `M(P⊗Q) = c_P·P⊗P`.
    #[serde(with = "serde_rational")]
    pub probabilistic_optimum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloningReport {
    pub system: SystemType,
    pub verdicts: Vec<CloningVerdict>,
}

/// The cloning LP for blank state `standard`. Variables are the entries of
/// `M` (row-major, on the two-copy system), then for the probabilistic form
/// one `c_P` per pure state and the bound `t`.
///
/// Admissibility is imposed through necessary conditions only: every pure
/// state of the two-copy system must map into the allowed cone with norm
/// one (deterministic) or at most one (probabilistic).
pub fn cloning_lp(t: &SystemType, standard: &[Rational], deterministic: bool) -> Result<HRep> {
    rational_only(t)?;
    if !t.is_single() {
        return Err(GptError::Unsupported(
            "cloning is checked for single systems".into(),
        ));
    }
    let pair = t.compose(t)?;
    let d2 = pair.dim();
    let pure = vertices(t)?;
    let np = pure.len();
    let nm = d2 * d2;
    let nvars = if deterministic { nm } else { nm + np + 1 };
    let cone = cone_hrep(&pair)?;
    let norm_row: Vector = {
        let first = vec![0; pair.party_count()];
        let mut r = vec![Rational::zero(); d2];
        for a in pair.outcome_tuples() {
            r[pair.index(&first, &a)] = Rational::one();
        }
        r
    };
    let mut h = HRep::new(nvars);
    // Row `a` of M·w as a coefficient vector over the M variables.
    let image_row = |a: &[Rational], w: &[Rational]| -> Vector {
        let mut row = vec![Rational::zero(); nvars];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                if !wj.is_zero() {
                    row[i * d2 + j] += ai * wj;
                }
            }
        }
        row
    };
    for w in vertices(&pair)? {
        for c in &cone.inequalities {
            h.inequalities.push(Constraint::new(
                image_row(&c.coefficients, &w),
                Rational::zero(),
            ));
        }
        for c in &cone.equalities {
            h.equalities.push(Constraint::new(
                image_row(&c.coefficients, &w),
                Rational::zero(),
            ));
        }
        let nr = image_row(&norm_row, &w);
        if deterministic {
            h.equalities.push(Constraint::new(nr, Rational::one()));
        } else {
            h.inequalities.push(Constraint::new(
                nr.iter().map(|x| -x).collect(),
                -Rational::one(),
            ));
        }
    }
    for (pi, p) in pure.iter().enumerate() {
        let input = kron_vec(p, standard);
        let target = kron_vec(p, p);
        for (i, ti) in target.iter().enumerate() {
            let mut e = vec![Rational::zero(); d2];
            e[i] = Rational::one();
            let mut row = image_row(&e, &input);
            if deterministic {
                h.equalities.push(Constraint::new(row, ti.clone()));
            } else {
                row[nm + pi] = -ti.clone();
                h.equalities.push(Constraint::new(row, Rational::zero()));
            }
        }
        if !deterministic {
            // c_P − t ≥ 0
            let mut row = vec![Rational::zero(); nvars];
            row[nm + pi] = Rational::one();
            row[nm + np] = -Rational::one();
            h.inequalities.push(Constraint::new(row, Rational::zero()));
        }
    }
    Ok(h)
}

/// Runs the deterministic and probabilistic cloning LPs for every pure blank
/// state.
pub fn no_cloning_check(t: &SystemType) -> Result<CloningReport> {
    rational_only(t)?;
    let pair = t.compose(t)?;
    let d2 = pair.dim();
    let mut verdicts = Vec::new();
    for q in vertices(t)? {
        let det = cloning_lp(t, &q, true)?;
        let zero = vec![Rational::zero(); det.ambient_dim];
        let r = solve_lp(&zero, &det, Sense::Minimize)?;
        let feasible = r.status == LpStatus::Optimal;
        let certificate_verified = r.certificate.as_ref().is_some_and(|c| c.verify(&det));
        let witness_map =
            feasible.then(|| Matrix::from_fn(d2, d2, |i, j| r.witness[i * d2 + j].clone()));

        let prob = cloning_lp(t, &q, false)?;
        let mut obj = vec![Rational::zero(); prob.ambient_dim];
        *obj.last_mut().expect("t variable") = Rational::one();
        let pr = solve_lp(&obj, &prob, Sense::Maximize)?;
        let optimum = match pr.status {
            LpStatus::Optimal => pr.optimum.expect("optimum"),
            _ => {
                return Err(GptError::Unsupported(
                    "probabilistic cloning LP is not bounded".into(),
                ))
            }
        };
        verdicts.push(CloningVerdict {
            standard: q,
            deterministic_feasible: feasible,
            certificate: r.certificate,
            certificate_verified,
            witness_map,
            probabilistic_optimum: optimum,
        });
    }
    Ok(CloningReport {
        system: t.clone(),
        verdicts,
    })
}

/// `e_a ⊗ e_b ↦ e_a ⊗ e_a` on two copies of a classical system.
pub fn classical_copy_map(outcomes: usize) -> Matrix {
    let d2 = outcomes * outcomes;
    let mut m = Matrix::zeros(d2, d2);
    for a in 0..outcomes {
        for b in 0..outcomes {
            m.set(a * outcomes + a, a * outcomes + b, Rational::one());
        }
    }
    m
}
