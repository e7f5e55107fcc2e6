//! Exact simplex with Bland's rule.
//!
//! Equalities are eliminated first by parametrizing their solution set, so the
//! tableau only carries the inequalities. Infeasible problems come back with a
//! Farkas certificate `(μ, λ)`: `λ ≥ 0`, `μᵀE + λᵀA = 0` and `μᵀe + λᵀb > 0`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::linalg::solve_affine;
use crate::polytope::{Constraint, HRep};
use crate::rational::{dot, serde_vector, Rational, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Proof that `{E x = e, A x ≥ b}` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "serde_vector")]
    pub equality_multipliers: Vector,
    #[serde(with = "serde_vector")]
    pub inequality_multipliers: Vector,
}

impl FarkasCertificate {
    pub fn verify(&self, h: &HRep) -> bool {
        if self.equality_multipliers.len() != h.equalities.len()
            || self.inequality_multipliers.len() != h.inequalities.len()
        {
            return false;
        }
        if self.inequality_multipliers.iter().any(Signed::is_negative) {
            return false;
        }
        let mut combo = vec![Rational::zero(); h.ambient_dim];
        let mut constant = Rational::zero();
        let rows = h
            .equalities
            .iter()
            .zip(&self.equality_multipliers)
            .chain(h.inequalities.iter().zip(&self.inequality_multipliers));
        for (row, m) in rows {
            if m.is_zero() {
                continue;
            }
            for (c, a) in combo.iter_mut().zip(&row.coefficients) {
                if !a.is_zero() {
                    *c += m * a;
                }
            }
            constant += m * &row.constant;
        }
        combo.iter().all(Zero::is_zero) && constant.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    #[serde(with = "opt_rational", default)]
    pub optimum: Option<Rational>,
    /// Optimal or feasible point; for infeasible problems the multipliers
    /// `μ` followed by `λ`.
    #[serde(with = "serde_vector")]
    pub witness: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FarkasCertificate>,
    /// Improving direction when unbounded.
    #[serde(with = "opt_vector", default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vector>,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(crate::rational::format_rational)
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| crate::rational::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

mod opt_vector {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Vector>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|x| {
                x.iter()
                    .map(crate::rational::format_rational)
                    .collect::<Vec<_>>()
            })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vector>, D::Error> {
        Option::<Vec<String>>::deserialize(d)?
            .map(|v| {
                v.iter()
                    .map(|t| crate::rational::parse_rational(t).map_err(serde::de::Error::custom))
                    .collect()
            })
            .transpose()
    }
}

struct Tableau {
    a: Vec<Vector>,
    rhs: Vector,
    basis: Vec<usize>,
    cost: Vector,
    value: Rational,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip();
        let support: Vec<usize> = (0..self.a[r].len())
            .filter(|&j| !self.a[r][j].is_zero())
            .collect();
        for &j in &support {
            self.a[r][j] *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.a[i][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            self.value += &f * &pivot_rhs;
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.cost[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    fn run(&mut self, allowed: usize) -> Outcome {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.a[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Outcome::Unbounded(c),
            }
        }
    }

    fn reset_costs(&mut self, costs: &[Rational]) {
        let n = costs.len();
        let mut reduced = costs.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..n {
                if !self.a[i][j].is_zero() {
                    reduced[j] -= cb * &self.a[i][j];
                }
            }
            value += cb * &self.rhs[i];
        }
        self.cost = reduced;
        self.value = value;
    }

    fn primal(&self, n: usize) -> Vector {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

/// Optimizes `objective · x` over `h`.
pub fn solve_lp(objective: &[Rational], h: &HRep, sense: Sense) -> Result<LpResult> {
    h.validate()?;
    let n = h.ambient_dim;
    if objective.len() != n {
        return Err(GptError::DimensionMismatch {
            expected: n,
            found: objective.len(),
        });
    }
    let eq_rows: Vec<Vector> = h
        .equalities
        .iter()
        .map(|r| r.coefficients.clone())
        .collect();
    let eq_rhs: Vector = h.equalities.iter().map(|r| r.constant.clone()).collect();
    let affine = match solve_affine(&eq_rows, &eq_rhs, n) {
        Ok(s) => s,
        Err(mu) => {
            let cert = FarkasCertificate {
                equality_multipliers: mu,
                inequality_multipliers: vec![Rational::zero(); h.inequalities.len()],
            };
            return Ok(infeasible(cert));
        }
    };
    let x0 = affine.particular;
    let dirs: Vec<Vector> = affine
        .directions
        .into_iter()
        .filter(|d| {
            !dot(objective, d).is_zero()
                || h.inequalities
                    .iter()
                    .any(|r| !dot(&r.coefficients, d).is_zero())
        })
        .collect();
    let k = dirs.len();
    let m = h.inequalities.len();
    let sign = match sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let reduced_obj: Vector = dirs.iter().map(|d| &sign * dot(objective, d)).collect();

    // Row i: f_i (A'_i y⁺ − A'_i y⁻ − s_i) = f_i b'_i with f_i chosen so the
    // right side is nonnegative.
    let a_red: Vec<Vector> = h
        .inequalities
        .iter()
        .map(|r| dirs.iter().map(|d| dot(&r.coefficients, d)).collect())
        .collect();
    let b_red: Vector = h
        .inequalities
        .iter()
        .map(|r| r.slack(&x0))
        .map(|s| -s)
        .collect();
    let needs_art: Vec<bool> = b_red.iter().map(Signed::is_positive).collect();
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let art_start = 2 * k + m;
    let total = art_start + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    for i in 0..m {
        let f = if needs_art[i] {
            Rational::one()
        } else {
            -Rational::one()
        };
        let mut row = vec![Rational::zero(); total];
        for j in 0..k {
            if !a_red[i][j].is_zero() {
                row[j] = &f * &a_red[i][j];
                row[k + j] = -row[j].clone();
            }
        }
        row[2 * k + i] = -f.clone();
        if needs_art[i] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(2 * k + i);
        }
        rows.push(row);
        rhs.push(&f * &b_red[i]);
    }
    let mut t = Tableau {
        a: rows,
        rhs,
        basis,
        cost: Vec::new(),
        value: Rational::zero(),
    };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); total];
        for c in phase1.iter_mut().skip(art_start) {
            *c = Rational::one();
        }
        t.reset_costs(&phase1);
        t.run(total);
        if t.value.is_positive() {
            let lambda: Vector = (0..m).map(|i| t.cost[2 * k + i].clone()).collect();
            let mu = equality_multipliers(h, &lambda);
            return Ok(infeasible(FarkasCertificate {
                equality_multipliers: mu,
                inequality_multipliers: lambda,
            }));
        }
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.a[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.a.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut phase2 = vec![Rational::zero(); total];
    for j in 0..k {
        phase2[j] = reduced_obj[j].clone();
        phase2[k + j] = -reduced_obj[j].clone();
    }
    t.reset_costs(&phase2);
    let outcome = t.run(art_start);
    let z = t.primal(art_start);
    let y: Vector = (0..k).map(|j| &z[j] - &z[k + j]).collect();
    let x = lift(&x0, &dirs, &y);
    match outcome {
        Outcome::Optimal => Ok(LpResult {
            status: LpStatus::Optimal,
            optimum: Some(dot(objective, &x)),
            witness: x,
            certificate: None,
            ray: None,
        }),
        Outcome::Unbounded(c) => {
            let mut d = vec![Rational::zero(); art_start];
            d[c] = Rational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                if b < art_start {
                    d[b] = -t.a[i][c].clone();
                }
            }
            let dy: Vector = (0..k).map(|j| &d[j] - &d[k + j]).collect();
            let ray = lift(&vec![Rational::zero(); n], &dirs, &dy);
            Ok(LpResult {
                status: LpStatus::Unbounded,
                optimum: None,
                witness: x,
                certificate: None,
                ray: Some(ray),
            })
        }
    }
}

fn lift(x0: &[Rational], dirs: &[Vector], y: &[Rational]) -> Vector {
    let mut x = x0.to_vec();
    for (d, yj) in dirs.iter().zip(y) {
        if yj.is_zero() {
            continue;
        }
        for (xi, di) in x.iter_mut().zip(d) {
            if !di.is_zero() {
                *xi += yj * di;
            }
        }
    }
    x
}

/// Solves `Eᵀμ = −Aᵀλ`; consistency is guaranteed because `Aᵀλ` is orthogonal
/// to the null space of `E`.
fn equality_multipliers(h: &HRep, lambda: &[Rational]) -> Vector {
    let n = h.ambient_dim;
    let me = h.equalities.len();
    if me == 0 {
        return Vec::new();
    }
    let mut target = vec![Rational::zero(); n];
    for (row, l) in h.inequalities.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        for (t, a) in target.iter_mut().zip(&row.coefficients) {
            if !a.is_zero() {
                *t -= l * a;
            }
        }
    }
    let columns: Vec<Vector> = (0..n)
        .map(|j| {
            h.equalities
                .iter()
                .map(|r| r.coefficients[j].clone())
                .collect()
        })
        .collect();
    solve_affine(&columns, &target, me)
        .map(|s| s.particular)
        .unwrap_or_else(|_| vec![Rational::zero(); me])
}

fn infeasible(cert: FarkasCertificate) -> LpResult {
    let mut witness = cert.equality_multipliers.clone();
    witness.extend(cert.inequality_multipliers.iter().cloned());
    LpResult {
        status: LpStatus::Infeasible,
        optimum: None,
        witness,
        certificate: Some(cert),
        ray: None,
    }
}

/// The system `Σ λ_i p_i + Σ μ_j r_j = target`, `λ, μ ≥ 0`, plus `Σ λ_i = 1`
/// when `convex`.
pub fn combination_hrep(
    points: &[Vector],
    rays: &[Vector],
    target: &[Rational],
    convex: bool,
) -> HRep {
    let gens: Vec<&Vector> = points.iter().chain(rays).collect();
    let nv = gens.len();
    let mut h = HRep::new(nv);
    for (i, t) in target.iter().enumerate() {
        let coeffs: Vector = gens.iter().map(|g| g[i].clone()).collect();
        h.equalities.push(Constraint::new(coeffs, t.clone()));
    }
    if convex {
        let coeffs: Vector = (0..nv)
            .map(|j| {
                if j < points.len() {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        h.equalities.push(Constraint::new(coeffs, Rational::one()));
    }
    for j in 0..nv {
        let mut e = vec![Rational::zero(); nv];
        e[j] = Rational::one();
        h.inequalities.push(Constraint::new(e, Rational::zero()));
    }
    h
}

/// Nonnegative weights expressing `target` from the generators, if any.
pub fn conic_combination(
    points: &[Vector],
    rays: &[Vector],
    target: &[Rational],
    convex: bool,
) -> Result<Option<Vector>> {
    for g in points.iter().chain(rays) {
        if g.len() != target.len() {
            return Err(GptError::DimensionMismatch {
                expected: target.len(),
                found: g.len(),
            });
        }
    }
    let h = combination_hrep(points, rays, target, convex);
    let r = solve_lp(&vec![Rational::zero(); h.ambient_dim], &h, Sense::Minimize)?;
    Ok((r.status == LpStatus::Optimal).then_some(r.witness))
}

/// Lexicographically smallest convex weight vector with `Σ w_i p_i = target`.
pub fn lexmin_convex_weights(points: &[Vector], target: &[Rational]) -> Result<Option<Vector>> {
    let Some(mut current) = conic_combination(points, &[], target, true)? else {
        return Ok(None);
    };
    let mut h = combination_hrep(points, &[], target, true);
    let nv = points.len();
    for i in 0..nv {
        if !current[i].is_zero() {
            let mut obj = vec![Rational::zero(); nv];
            obj[i] = Rational::one();
            let r = solve_lp(&obj, &h, Sense::Minimize)?;
            if r.status != LpStatus::Optimal {
                return Ok(None);
            }
            current = r.witness;
        }
        let mut e = vec![Rational::zero(); nv];
        e[i] = Rational::one();
        h.equalities.push(Constraint::new(e, current[i].clone()));
    }
    Ok(Some(current))
}
