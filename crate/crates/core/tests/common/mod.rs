#![allow(dead_code)]

use gpt_core::boxes::{local_relabel, pr_state};
use gpt_core::dynamics::{gbit_affine, Relabelling, Transformation};
use gpt_core::linalg::Matrix;
use gpt_core::lp::{solve_lp, LpStatus, Sense};
use gpt_core::polytope::{Constraint, HRep};
use gpt_core::rational::{int, rat, Rational, Vector};
use gpt_core::space::{cone_hrep, vertices};
use gpt_core::system::{Party, SystemType, Theory};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn two_gbits() -> SystemType {
    SystemType::gbits(Theory::Gnst, 2)
}

/// The 16 deterministic assignments written out by hand, independent of the
/// library's enumeration.
pub fn deterministic_two_gbit_states() -> Vec<Vector> {
    let t = two_gbits();
    let mut out = Vec::new();
    for fa in 0..4usize {
        for fb in 0..4usize {
            let mut v = vec![Rational::zero(); 16];
            for x in 0..2 {
                for y in 0..2 {
                    let a = fa >> x & 1;
                    let b = fb >> y & 1;
                    v[t.index(&[x, y], &[a, b])] = Rational::one();
                }
            }
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Deterministic states plus every reversible local relabelling of the PR
/// box, deduplicated.
pub fn brute_force_ns_vertices() -> Vec<Vector> {
    let pr = pr_state();
    let rels: Vec<Relabelling> = Relabelling::all(Party::GBIT)
        .into_iter()
        .filter(Relabelling::is_reversible)
        .collect();
    let mut pts = deterministic_two_gbit_states();
    for ra in &rels {
        for rb in &rels {
            pts.push(local_relabel(&pr.system, &[ra, rb], &pr.entries).unwrap());
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    rat(rng.gen_range(lo * den..=hi * den), den)
}

/// A random normalized convex combination of the given points.
pub fn random_mixture<R: Rng>(
    rng: &mut R,
    points: &[Vector],
    terms: usize,
) -> (Vec<(Rational, Vector)>, Vector) {
    let raw: Vec<i64> = (0..terms).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let picked: Vec<(Rational, Vector)> = raw
        .into_iter()
        .map(|w| (rat(w, total), points.choose(rng).unwrap().clone()))
        .collect();
    let mut mix = vec![Rational::zero(); points[0].len()];
    for (w, p) in &picked {
        for (m, x) in mix.iter_mut().zip(p) {
            *m += w * x;
        }
    }
    (picked, mix)
}

/// A random convex mixture of deterministic gbit relabellings.
pub fn random_relabelling_mixture<R: Rng>(rng: &mut R, terms: usize) -> Transformation {
    let rels = Relabelling::all(Party::GBIT);
    let raw: Vec<i64> = (0..terms).map(|_| rng.gen_range(1..=7)).collect();
    let total: i64 = raw.iter().sum();
    let mut m = Matrix::zeros(4, 4);
    for w in raw {
        let r = rels.choose(rng).unwrap();
        m = m.add(&r.matrix().scale(&rat(w, total))).unwrap();
    }
    Transformation::new(SystemType::gbit(), m).unwrap()
}

/// Affine map of the square `x ↦ c + A(x − c) + b`, linear through `|P|`.
pub fn gbit_affine_offset(a: [[Rational; 2]; 2], b: [Rational; 2]) -> Matrix {
    let mut m = gbit_affine(a);
    for (i, bi) in b.iter().enumerate() {
        for c in [0, 1] {
            m.set(2 * i, c, m.get(2 * i, c) + bi);
            m.set(2 * i + 1, c, m.get(2 * i + 1, c) - bi);
        }
    }
    m
}

/// Direct search for a violation: a pure gbit state or a two-gbit
/// no-signalling vertex whose image has a negative entry or the wrong norm.
pub fn direct_violation(m: &Matrix) -> bool {
    let single = deterministic_gbit_states();
    for v in &single {
        let img = m.mul_vec(v).unwrap();
        if img.iter().any(Signed::is_negative)
            || img[0].clone() + &img[1] != int(1)
            || img[2].clone() + &img[3] != int(1)
        {
            return true;
        }
    }
    let lifted = m.kron(&Matrix::identity(4));
    for w in brute_force_ns_vertices() {
        if lifted.mul_vec(&w).unwrap().iter().any(Signed::is_negative) {
            return true;
        }
    }
    false
}

pub fn deterministic_gbit_states() -> Vec<Vector> {
    (0..4usize)
        .map(|f| {
            let mut v = vec![Rational::zero(); 4];
            v[f & 1] = Rational::one();
            v[2 + (f >> 1 & 1)] = Rational::one();
            v
        })
        .collect()
}

/// Maximizes a random objective over single-gbit matrices that keep every
/// pure state normalized and inside the square and keep every two-gbit
/// vertex inside the no-signalling cone under `M ⊗ I`, with entries boxed to
/// `[-1, 2]`. Vertices of this region are the hardest admissible inputs.
pub fn adversarial_admissible<R: Rng>(rng: &mut R) -> Matrix {
    let d = 4;
    let nv = d * d;
    let mut h = HRep::new(nv);
    let coeff_row = |a: &[Rational], w: &[Rational], cols: usize| -> Vector {
        // Row `a` of (M ⊗ I_cols/d)·w as a form in the entries of M.
        let mut row = vec![Rational::zero(); nv];
        let anc = cols / d;
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let (r, k) = (i / anc, i % anc);
            for j in 0..d {
                let wj = &w[j * anc + k];
                if !wj.is_zero() {
                    row[r * d + j] += ai * wj;
                }
            }
        }
        row
    };
    for v in vertices(&SystemType::gbit()).unwrap() {
        for i in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            h.inequalities
                .push(Constraint::new(coeff_row(&e, &v, d), Rational::zero()));
        }
        for x in 0..2 {
            let mut e = vec![Rational::zero(); d];
            e[2 * x] = Rational::one();
            e[2 * x + 1] = Rational::one();
            h.equalities
                .push(Constraint::new(coeff_row(&e, &v, d), Rational::one()));
        }
    }
    let pair = two_gbits();
    let cone = cone_hrep(&pair).unwrap();
    for w in vertices(&pair).unwrap() {
        for c in &cone.inequalities {
            h.inequalities.push(Constraint::new(
                coeff_row(&c.coefficients, &w, 16),
                Rational::zero(),
            ));
        }
        for c in &cone.equalities {
            h.equalities.push(Constraint::new(
                coeff_row(&c.coefficients, &w, 16),
                Rational::zero(),
            ));
        }
    }
    for k in 0..nv {
        let mut lo = vec![Rational::zero(); nv];
        lo[k] = Rational::one();
        h.inequalities.push(Constraint::new(lo.clone(), int(-1)));
        let hi: Vector = lo.iter().map(|x| -x).collect();
        h.inequalities.push(Constraint::new(hi, int(-2)));
    }
    let objective: Vector = (0..nv).map(|_| int(rng.gen_range(-5..=5))).collect();
    let r = solve_lp(&objective, &h, Sense::Maximize).unwrap();
    assert_eq!(r.status, LpStatus::Optimal);
    Matrix::from_fn(d, d, |i, j| r.witness[i * d + j].clone())
}

/// A random invertible rational matrix (unit lower times unit upper
/// triangular, then a random row permutation).
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let lower = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rational::one(),
        std::cmp::Ordering::Greater => rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
        std::cmp::Ordering::Less => Rational::zero(),
    });
    let upper = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => rat(rng.gen_range(1..=4), rng.gen_range(1..=3)),
        std::cmp::Ordering::Less => rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
        std::cmp::Ordering::Greater => Rational::zero(),
    });
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let p = Matrix::from_fn(n, n, |i, j| {
        if perm[i] == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    p.mul(&lower.mul(&upper).unwrap()).unwrap()
}
