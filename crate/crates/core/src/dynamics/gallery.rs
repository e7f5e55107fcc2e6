//! Named transformations of the gbit square and the (3,2) cube.

use num_traits::{One, Zero};

use crate::linalg::Matrix;
use crate::rational::{int, rat, Rational};

/// Rational stand-in for `cos(π/4) = sin(π/4)`.
pub const SQRT_HALF_APPROX: (i64, i64) = (7071, 10000);

/// Affine map `(x, y) ↦ c + A((x, y) − c)` of the gbit square about its
/// centre `c = (1/2, 1/2)`, where `x = P(1|1)` and `y = P(1|2)`. Written
/// linearly by reading `|P|` off each measurement's own sum.
pub fn gbit_affine(a: [[Rational; 2]; 2]) -> Matrix {
    let half = rat(1, 2);
    let mut m = Matrix::zeros(4, 4);
    for i in 0..2 {
        for (row, sign) in [(2 * i, Rational::one()), (2 * i + 1, -Rational::one())] {
            // (1/2)|P| from measurement i's own outcomes.
            for c in [2 * i, 2 * i + 1] {
                m.set(row, c, m.get(row, c) + &half);
            }
            // ± Σ_j A_ij (P(1|j) − P(2|j)) / 2
            for j in 0..2 {
                let w = &sign * &a[i][j] * &half;
                if w.is_zero() {
                    continue;
                }
                m.set(row, 2 * j, m.get(row, 2 * j) + &w);
                m.set(row, 2 * j + 1, m.get(row, 2 * j + 1) - &w);
            }
        }
    }
    m
}

/// Quarter turn of the square: `(x, y) ↦ (1 − y, x)`.
pub fn fig2_rotation() -> Matrix {
    Matrix::from_rows(vec![
        vec![int(0), int(0), int(0), int(1)],
        vec![int(0), int(0), int(1), int(0)],
        vec![int(1), int(0), int(0), int(0)],
        vec![int(0), int(1), int(0), int(0)],
    ])
    .expect("square")
}

/// Shrink halfway towards the centre: `P ↦ P/2 + |P|·c/2`.
pub fn fig3_shrink() -> Matrix {
    let mut m = Matrix::identity(4).scale(&rat(1, 2));
    for i in 0..4 {
        // |P| read from the first measurement, times c_i = 1/2, times 1/2.
        for c in [0, 1] {
            m.set(i, c, m.get(i, c) + rat(1, 4));
        }
    }
    m
}

/// Eighth turn of the square with `cos = sin =` [`SQRT_HALF_APPROX`].
pub fn fig4_rotation() -> Matrix {
    let s = rat(SQRT_HALF_APPROX.0, SQRT_HALF_APPROX.1);
    gbit_affine([[s.clone(), -s.clone()], [s.clone(), s]])
}

/// Flip every outcome of a (3,2) system: the central reflection of the cube.
pub fn cube_universal_not() -> Matrix {
    let mut m = Matrix::zeros(6, 6);
    for x in 0..3 {
        m.set(2 * x, 2 * x + 1, Rational::one());
        m.set(2 * x + 1, 2 * x, Rational::one());
    }
    m
}
