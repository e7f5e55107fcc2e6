//! Dense exact linear algebra over the rationals.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GptError, Result};
use crate::rational::{format_rational, Rational, Vector};

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        for row in &rows {
            if row.len() != cols {
                return Err(GptError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(GptError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| crate::rational::dot(self.row(i), v))
            .collect())
    }

    /// Row vector times matrix: `vᵀ M`.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.rows {
            return Err(GptError::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, m) in self.row(i).iter().enumerate() {
                if !m.is_zero() {
                    out[j] += vi * m;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(GptError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, factor: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(GptError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let a = self.get(i / other.rows, j / other.cols);
            if a.is_zero() {
                return Rational::zero();
            }
            a * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        crate::rational::is_nonnegative(&self.data)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let rows: Vec<Vector> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                }));
                r
            })
            .collect();
        let (reduced, pivots) = rref(rows, n);
        if pivots.len() < n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| reduced[i][n + j].clone()))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_vectors::serialize(&self.to_rows(), s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = crate::rational::serde_vectors::deserialize(d)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Reduced row echelon form over the first `pivot_cols` columns.
///
/// Columns past `pivot_cols` are carried along (augmented part) but never
/// chosen as pivots. Returns the reduced rows and the pivot columns, one per
/// nonzero leading row, in order.
pub fn rref(mut rows: Vec<Vector>, pivot_cols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        let nonzero: Vec<usize> = (0..rows[r].len())
            .filter(|&j| !rows[r][j].is_zero())
            .collect();
        for &j in &nonzero {
            rows[r][j] *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (rows, pivots)
}

pub fn rank(rows: &[Vector]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    rref(rows.to_vec(), cols).1.len()
}

/// Basis of `{x : row · x = 0 for every row}` in a space of dimension `cols`.
pub fn nullspace(rows: &[Vector], cols: usize) -> Vec<Vector> {
    let (reduced, pivots) = rref(rows.to_vec(), cols);
    let is_pivot: Vec<bool> = (0..cols).map(|c| pivots.contains(&c)).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -reduced[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solution of an affine system `E x = e`.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    /// A particular solution (free coordinates set to zero).
    pub particular: Vector,
    /// Basis of the null space of `E`, one vector per free coordinate.
    pub directions: Vec<Vector>,
}

/// Solves `E x = e`. On inconsistency returns multipliers `μ` with
/// `μᵀE = 0` and `μᵀe = 1`.
pub fn solve_affine(
    equations: &[Vector],
    rhs: &[Rational],
    cols: usize,
) -> std::result::Result<AffineSolution, Vector> {
    let m = equations.len();
    let rows: Vec<Vector> = equations
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (row, b))| {
            let mut r = row.clone();
            r.push(b.clone());
            r.extend((0..m).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let (reduced, pivots) = rref(rows, cols);
    // Rows past the pivots have zero coefficient part; a nonzero rhs means
    // the combination recorded in the tracker columns is a certificate.
    for row in reduced.iter().skip(pivots.len()) {
        if !row[cols].is_zero() {
            let scale = row[cols].recip();
            return Err(row[cols + 1..].iter().map(|x| x * &scale).collect());
        }
    }
    let mut particular = vec![Rational::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = reduced[r][cols].clone();
    }
    let is_pivot: Vec<bool> = (0..cols).map(|c| pivots.contains(&c)).collect();
    let mut directions = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -reduced[r][free].clone();
        }
        directions.push(v);
    }
    Ok(AffineSolution {
        particular,
        directions,
    })
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(vectors: &[Vector]) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut basis: Vec<Vector> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut candidate = basis.clone();
        candidate.push(v.clone());
        if rank(&candidate) == candidate.len() {
            basis = candidate;
            chosen.push(i);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn inverse_of_small_matrix() {
        let m = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        let singular = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = vec![vec![int(1), int(1), int(-1), int(-1)]];
        let basis = nullspace(&rows, 4);
        assert_eq!(basis.len(), 3);
        for v in &basis {
            assert!(crate::rational::dot(&rows[0], v).is_zero());
        }
    }

    #[test]
    fn inconsistent_system_yields_certificate() {
        let eqs = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let rhs = vec![int(1), int(3)];
        let mu = solve_affine(&eqs, &rhs, 2).unwrap_err();
        let combo = Matrix::from_rows(eqs).unwrap().left_mul_vec(&mu).unwrap();
        assert!(combo.iter().all(Zero::is_zero));
        assert_eq!(crate::rational::dot(&mu, &rhs), int(1));
    }

    #[test]
    fn kron_of_identities() {
        let a = Matrix::identity(2).scale(&rat(1, 2));
        let k = a.kron(&Matrix::identity(3));
        assert_eq!(k.rows(), 6);
        assert_eq!(k.get(4, 4), &rat(1, 2));
        assert!(k.get(0, 3).is_zero());
    }
}
