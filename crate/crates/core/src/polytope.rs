//! Halfspace and vertex representations of polyhedra.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::lp::{solve_lp, LpStatus, Sense};
use crate::rational::{
    dot, primitive, serde_rational, serde_vector, serde_vectors, Rational, Vector,
};

/// One linear row `coefficients · x (= or ≥) constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "serde_vector")]
    pub coefficients: Vector,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vector, constant: Rational) -> Self {
        Constraint {
            coefficients,
            constant,
        }
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.coefficients, x) - &self.constant
    }

    /// Scales the row (coefficients and constant together) to primitive integers.
    pub fn normalized(&self) -> Constraint {
        let mut joint = self.coefficients.clone();
        joint.push(self.constant.clone());
        let mut p = primitive(&joint);
        let constant = p.pop().unwrap_or_default();
        Constraint::new(p, constant)
    }

    /// Like [`Constraint::normalized`] but also fixes the sign so the first
    /// nonzero entry is positive; used for equalities, where sign is free.
    pub fn normalized_equality(&self) -> Constraint {
        let mut c = self.normalized();
        let first = c
            .coefficients
            .iter()
            .chain(std::iter::once(&c.constant))
            .find(|x| !x.is_zero())
            .cloned();
        if first.is_some_and(|f| f.is_negative()) {
            c.coefficients.iter_mut().for_each(|x| *x = -x.clone());
            c.constant = -c.constant;
        }
        c
    }
}

/// `{x : E x = e, A x ≥ b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HRep {
    pub ambient_dim: usize,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl HRep {
    pub fn new(ambient_dim: usize) -> Self {
        HRep {
            ambient_dim,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn with_rows(
        ambient_dim: usize,
        equalities: Vec<Constraint>,
        inequalities: Vec<Constraint>,
    ) -> Result<Self> {
        let h = HRep {
            ambient_dim,
            equalities,
            inequalities,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        for row in self.equalities.iter().chain(&self.inequalities) {
            if row.coefficients.len() != self.ambient_dim {
                return Err(GptError::DimensionMismatch {
                    expected: self.ambient_dim,
                    found: row.coefficients.len(),
                });
            }
        }
        Ok(())
    }

    pub fn push_equality(&mut self, coefficients: Vector, constant: Rational) {
        self.equalities
            .push(Constraint::new(coefficients, constant));
    }

    pub fn push_inequality(&mut self, coefficients: Vector, constant: Rational) {
        self.inequalities
            .push(Constraint::new(coefficients, constant));
    }

    /// Exact pointwise membership.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.ambient_dim {
            return Err(GptError::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.len(),
            });
        }
        Ok(self.equalities.iter().all(|r| r.slack(x).is_zero())
            && self.inequalities.iter().all(|r| !r.slack(x).is_negative()))
    }

    /// Stacks the rows of `other` onto a copy of `self`.
    pub fn intersect(&self, other: &HRep) -> Result<HRep> {
        if self.ambient_dim != other.ambient_dim {
            return Err(GptError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut h = self.clone();
        h.equalities.extend(other.equalities.iter().cloned());
        h.inequalities.extend(other.inequalities.iter().cloned());
        Ok(h)
    }

    /// Rows scaled to primitive integers, deduplicated and sorted.
    pub fn canonical(&self) -> HRep {
        let mut eq: Vec<Constraint> = self
            .equalities
            .iter()
            .map(Constraint::normalized_equality)
            .filter(|c| c.coefficients.iter().any(|x| !x.is_zero()))
            .collect();
        let mut ineq: Vec<Constraint> = self
            .inequalities
            .iter()
            .map(Constraint::normalized)
            .filter(|c| c.coefficients.iter().any(|x| !x.is_zero()) || c.constant.is_positive())
            .collect();
        eq.sort();
        eq.dedup();
        ineq.sort();
        ineq.dedup();
        HRep {
            ambient_dim: self.ambient_dim,
            equalities: eq,
            inequalities: ineq,
        }
    }

    /// True when every point of `self` lies in `outer`, decided by one LP per
    /// row of `outer`.
    pub fn is_subset_of(&self, outer: &HRep) -> Result<bool> {
        if self.ambient_dim != outer.ambient_dim {
            return Err(GptError::DimensionMismatch {
                expected: outer.ambient_dim,
                found: self.ambient_dim,
            });
        }
        let feasible = solve_lp(
            &vec![Rational::zero(); self.ambient_dim],
            self,
            Sense::Minimize,
        )?;
        if feasible.status == LpStatus::Infeasible {
            return Ok(true);
        }
        for row in &outer.inequalities {
            if !bounded_below(&row.coefficients, self, &row.constant)? {
                return Ok(false);
            }
        }
        for row in &outer.equalities {
            let neg: Vector = row.coefficients.iter().map(|x| -x).collect();
            if !bounded_below(&row.coefficients, self, &row.constant)?
                || !bounded_below(&neg, self, &-row.constant.clone())?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual containment.
    pub fn same_set(&self, other: &HRep) -> Result<bool> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }
}

fn bounded_below(objective: &[Rational], h: &HRep, bound: &Rational) -> Result<bool> {
    let r = solve_lp(objective, h, Sense::Minimize)?;
    Ok(match r.status {
        LpStatus::Optimal => r.optimum.as_ref().is_some_and(|v| v >= bound),
        LpStatus::Unbounded => false,
        LpStatus::Infeasible => true,
    })
}

/// Convex hull of `vertices` plus the conic hull of `rays`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRep {
    pub ambient_dim: usize,
    #[serde(with = "serde_vectors")]
    pub vertices: Vec<Vector>,
    #[serde(with = "serde_vectors", default)]
    pub rays: Vec<Vector>,
}

impl VRep {
    pub fn from_vertices(ambient_dim: usize, mut vertices: Vec<Vector>) -> Self {
        vertices.sort();
        vertices.dedup();
        VRep {
            ambient_dim,
            vertices,
            rays: Vec::new(),
        }
    }

    /// A pointed cone: the origin plus `rays`.
    pub fn cone(ambient_dim: usize, rays: Vec<Vector>) -> Self {
        VRep {
            ambient_dim,
            vertices: vec![vec![Rational::zero(); ambient_dim]],
            rays,
        }
    }

    /// Rays rescaled to primitive integer vectors, sorted, deduplicated.
    pub fn canonical_rays(&self) -> Vec<Vector> {
        let mut r: Vec<Vector> = self.rays.iter().map(|x| primitive(x)).collect();
        r.sort();
        r.dedup();
        r
    }

    /// Membership of `x` in the hull, decided by LP over the generators.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        Ok(crate::lp::conic_combination(&self.vertices, &self.rays, x, true)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn unit_square() -> HRep {
        let mut h = HRep::new(2);
        h.push_inequality(vec![int(1), int(0)], int(0));
        h.push_inequality(vec![int(0), int(1)], int(0));
        h.push_inequality(vec![int(-1), int(0)], int(-1));
        h.push_inequality(vec![int(0), int(-1)], int(-1));
        h
    }

    #[test]
    fn pointwise_membership() {
        let h = unit_square();
        assert!(h.contains(&[rat(1, 2), int(1)]).unwrap());
        assert!(!h.contains(&[rat(3, 2), int(0)]).unwrap());
        assert!(h.contains(&[int(1)]).is_err());
    }

    #[test]
    fn containment_by_lp() {
        let square = unit_square();
        let mut half = unit_square();
        half.push_inequality(vec![int(-1), int(0)], rat(-1, 2));
        assert!(half.is_subset_of(&square).unwrap());
        assert!(!square.is_subset_of(&half).unwrap());
        assert!(square.same_set(&square.canonical()).unwrap());
    }

    #[test]
    fn json_uses_fraction_strings() {
        let mut h = HRep::new(1);
        h.push_equality(vec![rat(1, 2)], int(4));
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains("\"1/2\"") && text.contains("\"4/1\""));
        let back: HRep = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}
