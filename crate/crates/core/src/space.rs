//! State spaces of the four theories.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::dd::{enumerate_vertices, to_hrep};
use crate::error::{GptError, Result};
use crate::lp::conic_combination;
use crate::polytope::{Constraint, HRep, VRep};
use crate::qubit::QubitState;
use crate::rational::{to_f64, Rational, Vector};
use crate::state::{kron_vec, StateVector};
use crate::system::{tuples, SystemType, Theory};

/// The normalized state set of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpace {
    Polytope(HRep),
    /// `Σ_i (2P(↑|i) − 1)² ≤ 1` over the three fiducial spin directions.
    BlochBall,
}

impl StateSpace {
    pub fn hrep(&self) -> Option<&HRep> {
        match self {
            StateSpace::Polytope(h) => Some(h),
            StateSpace::BlochBall => None,
        }
    }
}

pub fn state_space(t: &SystemType) -> Result<StateSpace> {
    t.validate()?;
    match t.theory {
        Theory::Qubit if t.is_single() => Ok(StateSpace::BlochBall),
        Theory::Qubit => Err(GptError::Unsupported("composite qubit state spaces".into())),
        Theory::Glt if !t.is_single() => Ok(StateSpace::Polytope(glt_hull(t, false)?)),
        _ => Ok(StateSpace::Polytope(no_signalling_hrep(
            t,
            Scale::Normalized,
        ))),
    }
}

/// H-rep of the normalized state set; errors for qubits.
pub fn state_space_hrep(t: &SystemType) -> Result<HRep> {
    match state_space(t)? {
        StateSpace::Polytope(h) => Ok(h),
        StateSpace::BlochBall => Err(GptError::Unsupported(
            "qubit state space is not a polytope".into(),
        )),
    }
}

/// States `c·P` with `P` normalized and `0 ≤ c ≤ 1`: the targets allowed for
/// images of normalized states under (possibly norm-decreasing) maps.
pub fn allowed_hrep(t: &SystemType) -> Result<HRep> {
    t.validate()?;
    match t.theory {
        Theory::Qubit => Err(GptError::Unsupported(
            "qubit state space is not a polytope".into(),
        )),
        Theory::Glt if !t.is_single() => glt_hull(t, true),
        _ => Ok(no_signalling_hrep(t, Scale::AtMostOne)),
    }
}

/// The cone S₊ of unnormalized states.
pub fn cone_hrep(t: &SystemType) -> Result<HRep> {
    t.validate()?;
    match t.theory {
        Theory::Qubit => Err(GptError::Unsupported(
            "qubit state space is not a polytope".into(),
        )),
        Theory::Glt if !t.is_single() => {
            check_glt_size(t)?;
            to_hrep(&VRep::cone(t.dim(), local_deterministic(t)))
        }
        _ => Ok(no_signalling_hrep(t, Scale::Free)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scale {
    Normalized,
    AtMostOne,
    Free,
}

/// Positivity, equal per-measurement sums and no-signalling for each party
/// (which gives every bipartition).
fn no_signalling_hrep(t: &SystemType, scale: Scale) -> HRep {
    let d = t.dim();
    let mut h = HRep::new(d);
    for i in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[i] = Rational::one();
        h.push_inequality(e, Rational::zero());
    }
    let sum_row = |xs: &[usize]| {
        let mut row = vec![Rational::zero(); d];
        for a in t.outcome_tuples() {
            row[t.index(xs, &a)] = Rational::one();
        }
        row
    };
    let xs_all = t.measurement_tuples();
    let first = sum_row(&xs_all[0]);
    match scale {
        Scale::Normalized => {
            for xs in &xs_all {
                h.push_equality(sum_row(xs), Rational::one());
            }
        }
        Scale::AtMostOne | Scale::Free => {
            for xs in xs_all.iter().skip(1) {
                let row: Vector = sum_row(xs).iter().zip(&first).map(|(a, b)| a - b).collect();
                h.push_equality(row, Rational::zero());
            }
            if scale == Scale::AtMostOne {
                h.push_inequality(first.iter().map(|x| -x).collect(), -Rational::one());
            }
        }
    }
    let n = t.party_count();
    if n > 1 {
        for p in 0..n {
            let party = t.parties[p];
            let others: Vec<usize> = (0..n).filter(|&q| q != p).collect();
            let radices: Vec<usize> = others
                .iter()
                .flat_map(|&q| [t.parties[q].measurements, t.parties[q].outcomes])
                .collect();
            for rest in tuples(&radices) {
                let sum_at = |x: usize| {
                    let mut row = vec![Rational::zero(); d];
                    let mut xs = vec![0; n];
                    let mut outs = vec![0; n];
                    for (j, &q) in others.iter().enumerate() {
                        xs[q] = rest[2 * j];
                        outs[q] = rest[2 * j + 1];
                    }
                    xs[p] = x;
                    for a in 0..party.outcomes {
                        outs[p] = a;
                        row[t.index(&xs, &outs)] = Rational::one();
                    }
                    row
                };
                let base = sum_at(0);
                for x in 1..party.measurements {
                    let row: Vector = sum_at(x).iter().zip(&base).map(|(a, b)| a - b).collect();
                    h.push_equality(row, Rational::zero());
                }
            }
        }
    }
    h
}

fn check_glt_size(t: &SystemType) -> Result<()> {
    if t.party_count() > 2 {
        return Err(GptError::Unsupported(
            "facets of local polytopes with more than two parties".into(),
        ));
    }
    Ok(())
}

fn glt_hull(t: &SystemType, with_origin: bool) -> Result<HRep> {
    check_glt_size(t)?;
    let mut verts = local_deterministic(t);
    if with_origin {
        verts.push(vec![Rational::zero(); t.dim()]);
    }
    to_hrep(&VRep::from_vertices(t.dim(), verts))
}

/// All product-deterministic states: each party assigns a definite outcome
/// to every fiducial measurement. Sorted lexicographically.
pub fn local_deterministic(t: &SystemType) -> Vec<Vector> {
    let mut states: Vec<Vector> = vec![vec![Rational::one()]];
    for p in &t.parties {
        let locals: Vec<Vector> = tuples(&vec![p.outcomes; p.measurements])
            .into_iter()
            .map(|assign| {
                let mut v = vec![Rational::zero(); p.dim()];
                for (x, a) in assign.into_iter().enumerate() {
                    v[x * p.outcomes + a] = Rational::one();
                }
                v
            })
            .collect();
        states = states
            .iter()
            .flat_map(|s| locals.iter().map(move |l| kron_vec(s, l)))
            .collect();
    }
    states.sort();
    states
}

static VERTEX_CACHE: Lazy<Mutex<HashMap<SystemType, Vec<Vector>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Pure states (vertices of the normalized state set), sorted lexicographically.
pub fn vertices(t: &SystemType) -> Result<Vec<Vector>> {
    t.validate()?;
    match t.theory {
        Theory::Qubit => Err(GptError::Unsupported(
            "the Bloch ball has infinitely many pure states".into(),
        )),
        Theory::Gnst if !t.is_single() => {
            if let Some(v) = VERTEX_CACHE.lock().expect("cache").get(t) {
                return Ok(v.clone());
            }
            let v = enumerate_vertices(&no_signalling_hrep(t, Scale::Normalized))?.vertices;
            VERTEX_CACHE
                .lock()
                .expect("cache")
                .insert(t.clone(), v.clone());
            Ok(v)
        }
        _ => Ok(local_deterministic(t)),
    }
}

fn check_dim(entries: &[Rational], t: &SystemType) -> Result<()> {
    if entries.len() != t.dim() {
        return Err(GptError::DimensionMismatch {
            expected: t.dim(),
            found: entries.len(),
        });
    }
    Ok(())
}

/// Exact membership of a normalized state in the theory's state set (the
/// qubit case uses the float ball test).
pub fn is_member(p: &StateVector, t: &SystemType) -> Result<bool> {
    t.validate()?;
    check_dim(&p.entries, t)?;
    match t.theory {
        Theory::Qubit => {
            let q = QubitState::from_rationals(&p.entries)?;
            Ok(q.is_member())
        }
        Theory::Glt if !t.is_single() => Ok(p.entries.iter().all(|x| !x.is_negative())
            && conic_combination(&local_deterministic(t), &[], &p.entries, true)?.is_some()),
        _ => no_signalling_hrep(t, Scale::Normalized).contains(&p.entries),
    }
}

/// Membership in `{c·P : P ∈ S, 0 ≤ c ≤ 1}`.
pub fn is_allowed(entries: &[Rational], t: &SystemType) -> Result<bool> {
    t.validate()?;
    check_dim(entries, t)?;
    match t.theory {
        Theory::Qubit => {
            let q = QubitState::from_rationals(entries)?;
            Ok(q.is_allowed())
        }
        Theory::Glt if !t.is_single() => {
            if entries.iter().any(Signed::is_negative) {
                return Ok(false);
            }
            let s = StateVector {
                system: t.clone(),
                entries: entries.to_vec(),
            };
            let Ok(c) = s.norm() else { return Ok(false) };
            if c.is_zero() {
                return Ok(entries.iter().all(Zero::is_zero));
            }
            if c > Rational::one() {
                return Ok(false);
            }
            let scaled: Vector = entries.iter().map(|x| x / &c).collect();
            Ok(conic_combination(&local_deterministic(t), &[], &scaled, true)?.is_some())
        }
        _ => no_signalling_hrep(t, Scale::AtMostOne).contains(entries),
    }
}

/// Float view used in reports.
pub fn to_floats(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Rows of an H-rep as constraints on `M·x`: `(Mᵀa)·x ≥ b`.
pub fn pull_back(h: &HRep, m: &crate::linalg::Matrix) -> Result<HRep> {
    let pull = |c: &Constraint| -> Result<Constraint> {
        Ok(Constraint::new(
            m.left_mul_vec(&c.coefficients)?,
            c.constant.clone(),
        ))
    };
    Ok(HRep {
        ambient_dim: m.cols(),
        equalities: h.equalities.iter().map(pull).collect::<Result<_>>()?,
        inequalities: h.inequalities.iter().map(pull).collect::<Result<_>>()?,
    })
}
