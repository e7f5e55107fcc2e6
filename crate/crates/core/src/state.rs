//! State vectors and effects with exact entries.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::linalg::Matrix;
use crate::rational::{dot, serde_vector, Rational, Vector};
use crate::system::{SystemType, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateVector {
    pub system: SystemType,
    #[serde(with = "serde_vector")]
    pub entries: Vector,
}

impl StateVector {
    pub fn new(system: SystemType, entries: Vector) -> Result<Self> {
        system.validate()?;
        if entries.len() != system.dim() {
            return Err(GptError::DimensionMismatch {
                expected: system.dim(),
                found: entries.len(),
            });
        }
        Ok(StateVector { system, entries })
    }

    pub fn zero(system: SystemType) -> Self {
        let entries = vec![Rational::zero(); system.dim()];
        StateVector { system, entries }
    }

    /// The pure state of a single party assigning outcome `outcomes[X]` to
    /// each fiducial measurement `X`.
    pub fn deterministic(system: SystemType, outcomes: &[Vec<usize>]) -> Result<Self> {
        if outcomes.len() != system.party_count() {
            return Err(GptError::DimensionMismatch {
                expected: system.party_count(),
                found: outcomes.len(),
            });
        }
        let mut state: Option<Vector> = None;
        for (p, assign) in system.parties.iter().zip(outcomes) {
            if assign.len() != p.measurements || assign.iter().any(|&a| a >= p.outcomes) {
                return Err(GptError::MalformedState(
                    "bad deterministic assignment".into(),
                ));
            }
            let mut local = vec![Rational::zero(); p.dim()];
            for (x, &a) in assign.iter().enumerate() {
                local[x * p.outcomes + a] = Rational::one();
            }
            state = Some(match state {
                None => local,
                Some(s) => kron_vec(&s, &local),
            });
        }
        StateVector::new(system, state.unwrap_or_default())
    }

    pub fn get(&self, xs: &[usize], outs: &[usize]) -> &Rational {
        &self.entries[self.system.index(xs, outs)]
    }

    /// `Σ_a P(a|X)` for the joint measurement `xs`.
    pub fn measurement_sum(&self, xs: &[usize]) -> Rational {
        self.system
            .outcome_tuples()
            .iter()
            .map(|a| self.get(xs, a).clone())
            .sum()
    }

    /// The common per-measurement sum `|P|`.
    pub fn norm(&self) -> Result<Rational> {
        let mut common: Option<Rational> = None;
        for xs in self.system.measurement_tuples() {
            let s = self.measurement_sum(&xs);
            match &common {
                None => common = Some(s),
                Some(c) if *c == s => {}
                Some(c) => {
                    return Err(GptError::MalformedState(format!(
                        "measurement sums differ: {c} vs {s} at {xs:?}"
                    )))
                }
            }
        }
        Ok(common.unwrap_or_default())
    }

    pub fn is_normalized(&self) -> bool {
        self.norm().is_ok_and(|c| c.is_one())
    }

    pub fn scale(&self, factor: &Rational) -> StateVector {
        StateVector {
            system: self.system.clone(),
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    /// Convex (or any linear) combination of states of the same system.
    pub fn combine(terms: &[(Rational, &StateVector)]) -> Result<StateVector> {
        let first = terms
            .first()
            .ok_or_else(|| GptError::MalformedState("empty combination".into()))?;
        let mut out = vec![Rational::zero(); first.1.entries.len()];
        for (w, s) in terms {
            if s.system != first.1.system {
                return Err(GptError::TheoryMismatch(
                    "combining different systems".into(),
                ));
            }
            for (o, e) in out.iter_mut().zip(&s.entries) {
                if !e.is_zero() {
                    *o += w * e;
                }
            }
        }
        StateVector::new(first.1.system.clone(), out)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let system = self.system.compose(&other.system)?;
        Ok(StateVector {
            system,
            entries: kron_vec(&self.entries, &other.entries),
        })
    }

    /// Marginal on the listed parties (kept in the given, increasing order).
    ///
    /// The sum over the other parties' outcomes must not depend on their
    /// measurement choice; otherwise the state is signalling.
    pub fn marginal(&self, keep: &[usize]) -> Result<StateVector> {
        let n = self.system.party_count();
        if keep.iter().any(|&p| p >= n) || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GptError::InvalidSystem(format!("bad party list {keep:?}")));
        }
        let rest: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
        let sub = self.system.subsystem(keep);
        let other = self.system.subsystem(&rest);
        let mut out: Option<Vector> = None;
        for xr in other.measurement_tuples() {
            let mut marg = vec![Rational::zero(); sub.dim()];
            for idx in 0..self.entries.len() {
                let e = &self.entries[idx];
                if e.is_zero() {
                    continue;
                }
                let (xs, outs) = self.system.labels(idx);
                if rest.iter().zip(&xr).any(|(&p, &x)| xs[p] != x) {
                    continue;
                }
                let kx: Vec<usize> = keep.iter().map(|&p| xs[p]).collect();
                let ka: Vec<usize> = keep.iter().map(|&p| outs[p]).collect();
                marg[sub.index(&kx, &ka)] += e;
            }
            match &out {
                None => out = Some(marg),
                Some(prev) if *prev == marg => {}
                Some(_) => {
                    return Err(GptError::SignallingState(format!(
                        "marginal on parties {keep:?} depends on the other measurement choice"
                    )))
                }
            }
        }
        Ok(StateVector {
            system: sub,
            entries: out.unwrap_or_default(),
        })
    }

    /// Reduced state of one party.
    pub fn reduce(&self, keep_party: usize) -> Result<StateVector> {
        self.marginal(&[keep_party])
    }

    /// Checks that every subset of parties has a well-defined marginal.
    pub fn check_no_signalling(&self) -> Result<()> {
        let n = self.system.party_count();
        for mask in 1..(1usize << n) - 1 {
            let keep: Vec<usize> = (0..n).filter(|&p| mask & (1 << p) != 0).collect();
            self.marginal(&keep)?;
        }
        Ok(())
    }

    /// Outcome distribution of fiducial measurement `x` on `party`.
    pub fn outcome_probabilities(&self, party: usize, x: usize) -> Result<Vector> {
        let local = self.marginal(&[party])?;
        let p = self.system.parties[party];
        Ok((0..p.outcomes)
            .map(|a| local.entries[x * p.outcomes + a].clone())
            .collect())
    }

    /// Unnormalized conditional state of the other parties after `party`
    /// measures `x` and obtains `a`; its norm is the outcome probability.
    pub fn condition(&self, party: usize, x: usize, a: usize) -> Result<StateVector> {
        let n = self.system.party_count();
        if party >= n {
            return Err(GptError::InvalidSystem(format!("no party {party}")));
        }
        if n == 1 {
            return Err(GptError::InvalidSystem(
                "cannot condition a single party".into(),
            ));
        }
        let rest: Vec<usize> = (0..n).filter(|&p| p != party).collect();
        let sub = self.system.subsystem(&rest);
        let mut out = vec![Rational::zero(); sub.dim()];
        for (idx, e) in self.entries.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let (xs, outs) = self.system.labels(idx);
            if xs[party] != x || outs[party] != a {
                continue;
            }
            let rx: Vec<usize> = rest.iter().map(|&p| xs[p]).collect();
            let ra: Vec<usize> = rest.iter().map(|&p| outs[p]).collect();
            out[sub.index(&rx, &ra)] += e;
        }
        Ok(StateVector {
            system: sub,
            entries: out,
        })
    }

    pub fn apply(&self, m: &Matrix) -> Result<StateVector> {
        Ok(StateVector {
            system: self.system.clone(),
            entries: m.mul_vec(&self.entries)?,
        })
    }

    pub fn is_rational_theory(&self) -> bool {
        self.system.theory != Theory::Qubit
    }
}

pub fn kron_vec(a: &[Rational], b: &[Rational]) -> Vector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(if x.is_zero() || y.is_zero() {
                Rational::zero()
            } else {
                x * y
            });
        }
    }
    out
}

/// A linear functional on states; `R·P` is an outcome probability.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Effect {
    pub system: SystemType,
    #[serde(with = "serde_vector")]
    pub entries: Vector,
}

impl Effect {
    pub fn new(system: SystemType, entries: Vector) -> Result<Self> {
        if entries.len() != system.dim() {
            return Err(GptError::DimensionMismatch {
                expected: system.dim(),
                found: entries.len(),
            });
        }
        Ok(Effect { system, entries })
    }

    /// `I`: one on the first joint measurement's outcomes, zero elsewhere.
    pub fn identity(system: SystemType) -> Self {
        let first = vec![0; system.party_count()];
        let mut entries = vec![Rational::zero(); system.dim()];
        for a in system.outcome_tuples() {
            entries[system.index(&first, &a)] = Rational::one();
        }
        Effect { system, entries }
    }

    /// Indicator of outcome tuple `outs` for joint measurement `xs`.
    pub fn basis(system: SystemType, xs: &[usize], outs: &[usize]) -> Self {
        let mut entries = vec![Rational::zero(); system.dim()];
        entries[system.index(xs, outs)] = Rational::one();
        Effect { system, entries }
    }

    pub fn pair(&self, p: &StateVector) -> Result<Rational> {
        if p.entries.len() != self.entries.len() {
            return Err(GptError::DimensionMismatch {
                expected: self.entries.len(),
                found: p.entries.len(),
            });
        }
        Ok(dot(&self.entries, &p.entries))
    }

    /// `0 ≤ R·v ≤ |v|` on every listed vertex.
    pub fn is_valid_on(&self, vertices: &[Vector]) -> bool {
        vertices.iter().all(|v| {
            let value = dot(&self.entries, v);
            let norm = StateVector {
                system: self.system.clone(),
                entries: v.clone(),
            }
            .norm()
            .unwrap_or_default();
            !value.is_negative() && value <= norm
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::system::Party;

    fn gbit_pure(o1: usize, o2: usize) -> StateVector {
        StateVector::deterministic(SystemType::gbit(), &[vec![o1, o2]]).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(gbit_pure(0, 1).norm().unwrap(), int(1));
        assert_eq!(
            StateVector::zero(SystemType::gbit()).norm().unwrap(),
            int(0)
        );
        assert_eq!(gbit_pure(1, 1).scale(&rat(1, 2)).norm().unwrap(), rat(1, 2));
        let bad =
            StateVector::new(SystemType::gbit(), vec![int(1), int(0), int(0), int(0)]).unwrap();
        assert!(matches!(bad.norm(), Err(GptError::MalformedState(_))));
    }

    #[test]
    fn tensor_of_pure_gbits_is_deterministic() {
        let t = gbit_pure(0, 1).tensor(&gbit_pure(1, 0)).unwrap();
        assert_eq!(t.entries.len(), 16);
        for xs in t.system.measurement_tuples() {
            let ones = t
                .system
                .outcome_tuples()
                .iter()
                .filter(|a| t.get(&xs, a).is_one())
                .count();
            assert_eq!(ones, 1);
        }
        assert_eq!(t.reduce(0).unwrap(), gbit_pure(0, 1));
        let z = gbit_pure(0, 0)
            .tensor(&StateVector::zero(SystemType::gbit()))
            .unwrap();
        assert!(z.entries.iter().all(Zero::is_zero));
    }

    #[test]
    fn classical_dice_marginal_is_uniform() {
        let t =
            SystemType::new(Theory::Classical, vec![Party::new(1, 6), Party::new(1, 6)]).unwrap();
        let mut entries = vec![int(0); 36];
        for i in 0..6 {
            entries[t.index(&[0, 0], &[i, i])] = rat(1, 6);
        }
        let s = StateVector::new(t, entries).unwrap();
        assert_eq!(s.reduce(0).unwrap().entries, vec![rat(1, 6); 6]);
    }

    #[test]
    fn signalling_state_is_detected() {
        let t = SystemType::gbits(Theory::Gnst, 2);
        let mut entries = vec![int(0); 16];
        // Bob's outcome copies Alice's setting.
        for x in 0..2 {
            for y in 0..2 {
                entries[t.index(&[x, y], &[0, x])] = int(1);
            }
        }
        let s = StateVector::new(t, entries).unwrap();
        assert!(matches!(s.reduce(1), Err(GptError::SignallingState(_))));
    }

    #[test]
    fn identity_effect_gives_norm() {
        let e = Effect::identity(SystemType::gbit());
        let p = gbit_pure(1, 0).scale(&rat(2, 3));
        assert_eq!(e.pair(&p).unwrap(), rat(2, 3));
    }
}
