//! Single-qubit states in the fiducial spin basis, with float entries.
//!
//! Entries are `(P(↑|x), P(↓|x), P(↑|y), P(↓|y), P(↑|z), P(↓|z))`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GptError, Result};
use crate::rational::{parse_rational, to_f64, Rational};

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub entries: [f64; 6],
}

impl QubitState {
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let mut entries = [0.0; 6];
        for i in 0..3 {
            entries[2 * i] = (1.0 + r[i]) / 2.0;
            entries[2 * i + 1] = (1.0 - r[i]) / 2.0;
        }
        QubitState { entries }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let entries: [f64; 6] = v.try_into().map_err(|_| GptError::DimensionMismatch {
            expected: 6,
            found: v.len(),
        })?;
        Ok(QubitState { entries })
    }

    pub fn from_rationals(v: &[Rational]) -> Result<Self> {
        QubitState::from_slice(&v.iter().map(to_f64).collect::<Vec<_>>())
    }

    /// Common per-measurement sum, if the three sums agree within tolerance.
    pub fn norm(&self) -> Option<f64> {
        let sums: Vec<f64> = (0..3)
            .map(|i| self.entries[2 * i] + self.entries[2 * i + 1])
            .collect();
        let ok = sums.iter().all(|s| (s - sums[0]).abs() <= TOLERANCE);
        ok.then_some(sums[0])
    }

    /// `2P(↑|i) − |P|` for each axis.
    pub fn bloch(&self) -> [f64; 3] {
        let c = self.norm().unwrap_or(f64::NAN);
        [0, 1, 2].map(|i| 2.0 * self.entries[2 * i] - c)
    }

    pub fn bloch_radius(&self) -> f64 {
        self.bloch().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_member(&self) -> bool {
        self.norm().is_some_and(|c| (c - 1.0).abs() <= TOLERANCE) && self.is_allowed()
    }

    /// Subnormalized membership: `|r| ≤ |P| ≤ 1` and nonnegative entries.
    pub fn is_allowed(&self) -> bool {
        let Some(c) = self.norm() else { return false };
        self.entries.iter().all(|&x| x >= -TOLERANCE)
            && c <= 1.0 + TOLERANCE
            && self.bloch_radius() <= c + TOLERANCE
    }

    pub fn apply(&self, m: &[[f64; 6]; 6]) -> QubitState {
        let mut out = [0.0; 6];
        for (o, row) in out.iter_mut().zip(m) {
            *o = row.iter().zip(&self.entries).map(|(a, b)| a * b).sum();
        }
        QubitState { entries: out }
    }
}

impl Serialize for QubitState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let texts: Vec<String> = self.entries.iter().map(|x| format_float(*x)).collect();
        texts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QubitState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        let vals = texts
            .iter()
            .map(|t| parse_float(t))
            .collect::<Result<Vec<f64>>>()
            .map_err(serde::de::Error::custom)?;
        QubitState::from_slice(&vals).map_err(serde::de::Error::custom)
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accepts a decimal or a `"p/q"` rational.
pub fn parse_float(text: &str) -> Result<f64> {
    if text.contains('/') {
        return Ok(to_f64(&parse_rational(text)?));
    }
    text.trim()
        .parse::<f64>()
        .map_err(|_| GptError::Parse(format!("invalid number {text:?}")))
}

/// Affine action `r ↦ A r + b` on Bloch vectors induced by a 6×6 matrix on
/// normalized state vectors.
pub fn bloch_action(m: &[[f64; 6]; 6]) -> ([[f64; 3]; 3], [f64; 3]) {
    let centre = QubitState::from_bloch([0.0; 3]).apply(m);
    let b = centre.bloch();
    let mut a = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut r = [0.0; 3];
        r[j] = 1.0;
        let img = QubitState::from_bloch(r).apply(m).bloch();
        for i in 0..3 {
            a[i][j] = img[i] - b[i];
        }
    }
    (a, b)
}

fn spectral_norm(a: &[[f64; 3]; 3]) -> f64 {
    // Power iteration on AᵀA.
    let mut ata = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ata[i][j] = (0..3).map(|k| a[k][i] * a[k][j]).sum();
        }
    }
    let mut v = [1.0, 0.7, 0.3];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| ata[i][j] * v[j]).sum())
            .collect();
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        lambda = n;
        v = [w[0] / n, w[1] / n, w[2] / n];
    }
    lambda.sqrt()
}

/// Whether the map keeps every normalized qubit state inside the ball.
///
/// Accepts when `‖A‖₂ + |b| ≤ 1` (within tolerance), which is sufficient; when
/// that bound fails the sphere is sampled densely and any escaping image
/// rejects. Also requires normalization to be preserved.
pub fn preserves_ball(m: &[[f64; 6]; 6]) -> bool {
    for r in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0; 3]] {
        let img = QubitState::from_bloch(r).apply(m);
        if img.norm().is_none_or(|c| (c - 1.0).abs() > TOLERANCE) {
            return false;
        }
    }
    let (a, b) = bloch_action(m);
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if spectral_norm(&a) + nb <= 1.0 + TOLERANCE {
        return true;
    }
    let samples = 20_000;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..samples {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
        let rho = (1.0 - z * z).sqrt();
        let th = golden * i as f64;
        let r = [rho * th.cos(), rho * th.sin(), z];
        let img = QubitState::from_bloch(r).apply(m);
        if !img.is_member() {
            return false;
        }
    }
    true
}

/// Matrix of a rotation by `angle` about the z axis of the Bloch sphere.
pub fn z_rotation(angle: f64) -> [[f64; 6]; 6] {
    let (s, c) = angle.sin_cos();
    let a = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    affine_matrix(&a, &[0.0; 3])
}

/// The 6×6 matrix realizing `r ↦ A r + b` on normalized states, written so it
/// acts linearly: each output pair `(P(↑|i), P(↓|i))` reads `|P|` from the
/// first measurement sum.
pub fn affine_matrix(a: &[[f64; 3]; 3], b: &[f64; 3]) -> [[f64; 6]; 6] {
    // P(↑|i)' = (|P| + Σ_j A_ij r_j + b_i |P|)/2 with r_j = P(↑|j) − P(↓|j).
    let mut m = [[0.0; 6]; 6];
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            let row = if sign > 0.0 { 2 * i } else { 2 * i + 1 };
            m[row][0] += 0.5 * (1.0 + sign * b[i]);
            m[row][1] += 0.5 * (1.0 + sign * b[i]);
            for j in 0..3 {
                m[row][2 * j] += 0.5 * sign * a[i][j];
                m[row][2 * j + 1] -= 0.5 * sign * a[i][j];
            }
        }
    }
    m
}
