//! Double description conversions between [`HRep`] and [`VRep`].

use num_traits::{One, Signed, Zero};

use crate::error::{GptError, Result};
use crate::linalg::{independent_subset, nullspace, solve_affine, Matrix};
use crate::lp::{conic_combination, solve_lp, LpStatus, Sense};
use crate::polytope::{Constraint, HRep, VRep};
use crate::rational::{dot, primitive, Rational, Vector};

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vector,
    zeros: Bits,
}

/// Extreme rays of the pointed cone `{x : row · x ≥ 0}` in dimension `dim`.
///
/// The rows must have rank `dim`. Rows outside the initial basis are inserted
/// in lexicographic order.
pub fn extreme_rays(rows: &[Vector], dim: usize) -> Result<Vec<Vector>> {
    let m = rows.len();
    let basis_rows = independent_subset(rows);
    if basis_rows.len() < dim {
        return Err(GptError::Unsupported("cone is not pointed".into()));
    }
    let b = Matrix::from_rows(basis_rows.iter().map(|&i| rows[i].clone()).collect())?;
    let inv = b.inverse().expect("independent rows");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let v = primitive(&inv.column(j));
            let mut zeros = Bits::new(m);
            for &i in &basis_rows {
                if dot(&rows[i], &v).is_zero() {
                    zeros.set(i);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let mut rest: Vec<usize> = (0..m).filter(|i| !basis_rows.contains(i)).collect();
    rest.sort_by(|&x, &y| rows[x].cmp(&rows[y]).then(x.cmp(&y)));

    for &r in &rest {
        let vals: Vec<Rational> = rays.iter().map(|ray| dot(&rows[r], &ray.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (ray, val) in rays.iter_mut().zip(&vals) {
                if val.is_zero() {
                    ray.zeros.set(r);
                }
            }
            continue;
        }
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&o| o != p && o != q)
                    .all(|o| !common.is_subset_of(&rays[o].zeros));
                if !adjacent {
                    continue;
                }
                let v: Vector = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(vq, vp)| &vals[p] * vq - &vals[q] * vp)
                    .collect();
                let mut zeros = common;
                zeros.set(r);
                fresh.push(Ray {
                    v: primitive(&v),
                    zeros,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::new();
        for (i, mut ray) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                ray.zeros.set(r);
            }
            next.push(ray);
        }
        next.extend(fresh);
        rays = next;
    }
    let mut out: Vec<Vector> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Vertices and extreme rays of a pointed polyhedron.
pub fn to_vrep(h: &HRep) -> Result<VRep> {
    h.validate()?;
    let n = h.ambient_dim;
    let eq_rows: Vec<Vector> = h
        .equalities
        .iter()
        .map(|r| r.coefficients.clone())
        .collect();
    let eq_rhs: Vector = h.equalities.iter().map(|r| r.constant.clone()).collect();
    let affine = solve_affine(&eq_rows, &eq_rhs, n).map_err(|_| GptError::EmptyPolytope)?;
    let x0 = affine.particular;
    let dirs = affine.directions;
    let k = dirs.len();
    if k == 0 {
        return if h.contains(&x0)? {
            Ok(VRep::from_vertices(n, vec![x0]))
        } else {
            Err(GptError::EmptyPolytope)
        };
    }
    // Homogenize: (y, t) with A'y − b' t ≥ 0 and t ≥ 0.
    let mut rows: Vec<Vector> = h
        .inequalities
        .iter()
        .map(|r| {
            let mut row: Vector = dirs.iter().map(|d| dot(&r.coefficients, d)).collect();
            row.push(r.slack(&x0));
            row
        })
        .collect();
    let mut t_row = vec![Rational::zero(); k + 1];
    t_row[k] = Rational::one();
    rows.push(t_row);
    if independent_subset(&rows).len() < k + 1 {
        let r = solve_lp(&vec![Rational::zero(); n], h, Sense::Minimize)?;
        return Err(if r.status == LpStatus::Infeasible {
            GptError::EmptyPolytope
        } else {
            GptError::Unsupported("polyhedron contains a line".into())
        });
    }
    let generators = extreme_rays(&rows, k + 1)?;
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for g in generators {
        let t = g[k].clone();
        let to_x = |y: &[Rational], base: &[Rational]| {
            let mut x = base.to_vec();
            for (d, yj) in dirs.iter().zip(y) {
                if yj.is_zero() {
                    continue;
                }
                for (xi, di) in x.iter_mut().zip(d) {
                    *xi += yj * di;
                }
            }
            x
        };
        if t.is_positive() {
            let y: Vector = g[..k].iter().map(|v| v / &t).collect();
            vertices.push(to_x(&y, &x0));
        } else {
            rays.push(primitive(&to_x(&g[..k], &vec![Rational::zero(); n])));
        }
    }
    if vertices.is_empty() {
        return Err(GptError::EmptyPolytope);
    }
    vertices.sort();
    rays.sort();
    Ok(VRep {
        ambient_dim: n,
        vertices,
        rays,
    })
}

/// Vertices of a bounded polytope, sorted lexicographically.
pub fn enumerate_vertices(h: &HRep) -> Result<VRep> {
    match to_vrep(h) {
        Ok(v) if !v.rays.is_empty() => Err(GptError::Unbounded),
        Err(GptError::Unsupported(_)) => Err(GptError::Unbounded),
        other => other,
    }
}

/// Facet description of the hull of `v`'s vertices plus the cone of its rays.
pub fn to_hrep(v: &VRep) -> Result<HRep> {
    let n = v.ambient_dim;
    if v.vertices.is_empty() {
        return Err(GptError::EmptyPolytope);
    }
    for g in v.vertices.iter().chain(&v.rays) {
        if g.len() != n {
            return Err(GptError::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
    }
    // Homogenized generators (1, v) and (0, r).
    let gens: Vec<Vector> = v
        .vertices
        .iter()
        .map(|x| {
            std::iter::once(Rational::one())
                .chain(x.iter().cloned())
                .collect()
        })
        .chain(v.rays.iter().map(|r| {
            std::iter::once(Rational::zero())
                .chain(r.iter().cloned())
                .collect()
        }))
        .collect();
    let basis_idx = independent_subset(&gens);
    let basis: Vec<Vector> = basis_idx.iter().map(|&i| gens[i].clone()).collect();
    let k = basis.len();
    // Left inverse of the (n+1)×k basis matrix from k independent coordinates.
    let columns: Vec<Vector> = (0..=n)
        .map(|c| basis.iter().map(|b| b[c].clone()).collect())
        .collect();
    let coords = independent_subset(&columns);
    let sub = Matrix::from_rows(coords.iter().map(|&c| columns[c].clone()).collect())?;
    let sub_inv = sub.inverse().expect("independent coordinates");
    let project = |g: &Vector| -> Vector {
        let picked: Vector = coords.iter().map(|&c| g[c].clone()).collect();
        sub_inv.mul_vec(&picked).expect("dimensions")
    };
    let local: Vec<Vector> = gens.iter().map(project).collect();
    let facets = extreme_rays(&local, k)?;

    let mut h = HRep::new(n);
    for w in facets {
        // Lift w to (n+1) coordinates: ŵ = Lᵀ w where L picks `coords`.
        let lw = sub_inv.transpose().mul_vec(&w)?;
        let mut full = vec![Rational::zero(); n + 1];
        for (&c, val) in coords.iter().zip(&lw) {
            full[c] = val.clone();
        }
        if full[1..].iter().all(Zero::is_zero) {
            continue;
        }
        let row = Constraint::new(full[1..].to_vec(), -full[0].clone());
        h.inequalities.push(row.normalized());
    }
    for u in nullspace(&basis, n + 1) {
        let row = Constraint::new(u[1..].to_vec(), -u[0].clone());
        h.equalities.push(row.normalized_equality());
    }
    Ok(h.canonical())
}

/// Convex hull to facets.
pub fn hull_to_hrep(v: &VRep) -> Result<HRep> {
    to_hrep(v)
}

/// Generators of the dual cone `{R : R·P ≥ 0 for every P in the cone}`.
///
/// The input must describe a cone (all constants zero). Equalities contribute
/// a line in each direction; redundant generators are dropped by LP.
pub fn dual_cone_generators(h: &HRep) -> Result<VRep> {
    h.validate()?;
    if h.equalities
        .iter()
        .chain(&h.inequalities)
        .any(|r| !r.constant.is_zero())
    {
        return Err(GptError::Unsupported(
            "dual cone needs a homogeneous description".into(),
        ));
    }
    let n = h.ambient_dim;
    let eq_rows: Vec<Vector> = h
        .equalities
        .iter()
        .map(|r| r.coefficients.clone())
        .collect();
    let mut candidates: Vec<Vector> = h
        .inequalities
        .iter()
        .map(|r| primitive(&r.coefficients))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    for i in independent_subset(&eq_rows) {
        let p = primitive(&eq_rows[i]);
        candidates.push(p.iter().map(|x| -x).collect());
        candidates.push(p);
    }
    candidates.sort();
    candidates.dedup();
    let mut kept = candidates;
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vector> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if conic_combination(&[], &others, &kept[i], false)?.is_some() {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(VRep {
        ambient_dim: n,
        vertices: vec![vec![Rational::zero(); n]],
        rays: kept,
    })
}

/// `{x : g·x ≥ 0 for every generator g}`, the cone dual to a generator list.
pub fn polar_hrep(generators: &VRep) -> HRep {
    let mut h = HRep::new(generators.ambient_dim);
    for g in &generators.rays {
        h.push_inequality(g.clone(), Rational::zero());
    }
    h
}
