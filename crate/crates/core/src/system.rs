//! System types and the flat index scheme.
//!
//! A single party with `n` fiducial measurements of `k` outcomes each stores
//! `P(a|X)` at index `X·k + a` (labels are 0-based internally; the paper's
//! labels are these plus one). A composite index is the Kronecker composition
//! of the party indices with party A slowest, so a product state is exactly
//! the Kronecker product of its factors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Classical,
    Gnst,
    Glt,
    Qubit,
}

impl Theory {
    pub fn is_rational(self) -> bool {
        self != Theory::Qubit
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Theory::Classical => "classical",
            Theory::Gnst => "gnst",
            Theory::Glt => "glt",
            Theory::Qubit => "qubit",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Theory {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(Theory::Classical),
            "gnst" => Ok(Theory::Gnst),
            "glt" => Ok(Theory::Glt),
            "qubit" => Ok(Theory::Qubit),
            other => Err(GptError::Parse(format!("unknown theory {other:?}"))),
        }
    }
}

/// One party: `measurements` fiducial measurements with `outcomes` outcomes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Party {
    pub measurements: usize,
    pub outcomes: usize,
}

impl Party {
    pub const GBIT: Party = Party {
        measurements: 2,
        outcomes: 2,
    };

    pub fn new(measurements: usize, outcomes: usize) -> Self {
        Party {
            measurements,
            outcomes,
        }
    }

    pub fn dim(&self) -> usize {
        self.measurements * self.outcomes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemType {
    pub theory: Theory,
    pub parties: Vec<Party>,
}

impl SystemType {
    pub fn new(theory: Theory, parties: Vec<Party>) -> Result<Self> {
        let t = SystemType { theory, parties };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parties.is_empty() {
            return Err(GptError::InvalidSystem("no parties".into()));
        }
        for p in &self.parties {
            let ok = match self.theory {
                Theory::Classical => p.measurements == 1 && p.outcomes >= 1,
                Theory::Qubit => p.measurements == 3 && p.outcomes == 2,
                Theory::Gnst | Theory::Glt => p.measurements > 1 && p.outcomes > 1,
            };
            if !ok {
                return Err(GptError::InvalidSystem(format!(
                    "({}, {}) is not a valid {} party",
                    p.measurements, p.outcomes, self.theory
                )));
            }
        }
        Ok(())
    }

    pub fn single(theory: Theory, measurements: usize, outcomes: usize) -> Result<Self> {
        SystemType::new(theory, vec![Party::new(measurements, outcomes)])
    }

    pub fn uniform(
        theory: Theory,
        count: usize,
        measurements: usize,
        outcomes: usize,
    ) -> Result<Self> {
        SystemType::new(theory, vec![Party::new(measurements, outcomes); count])
    }

    pub fn gbit() -> Self {
        SystemType {
            theory: Theory::Gnst,
            parties: vec![Party::GBIT],
        }
    }

    pub fn gbits(theory: Theory, count: usize) -> Self {
        SystemType {
            theory,
            parties: vec![Party::GBIT; count],
        }
    }

    pub fn classical(outcomes: usize) -> Self {
        SystemType {
            theory: Theory::Classical,
            parties: vec![Party::new(1, outcomes)],
        }
    }

    pub fn qubit() -> Self {
        SystemType {
            theory: Theory::Qubit,
            parties: vec![Party::new(3, 2)],
        }
    }

    pub fn with_theory(&self, theory: Theory) -> Self {
        SystemType {
            theory,
            parties: self.parties.clone(),
        }
    }

    pub fn party_count(&self) -> usize {
        self.parties.len()
    }

    pub fn is_single(&self) -> bool {
        self.parties.len() == 1
    }

    pub fn dim(&self) -> usize {
        self.parties.iter().map(Party::dim).product()
    }

    /// Number of joint fiducial measurements.
    pub fn joint_measurements(&self) -> usize {
        self.parties.iter().map(|p| p.measurements).product()
    }

    pub fn joint_outcomes(&self) -> usize {
        self.parties.iter().map(|p| p.outcomes).product()
    }

    /// The composite of `self` followed by `other`.
    pub fn compose(&self, other: &SystemType) -> Result<SystemType> {
        if self.theory != other.theory {
            return Err(GptError::TheoryMismatch(format!(
                "cannot compose {} with {}",
                self.theory, other.theory
            )));
        }
        let mut parties = self.parties.clone();
        parties.extend(other.parties.iter().copied());
        Ok(SystemType {
            theory: self.theory,
            parties,
        })
    }

    /// Subsystem made of the listed parties (in the given order).
    pub fn subsystem(&self, keep: &[usize]) -> SystemType {
        SystemType {
            theory: self.theory,
            parties: keep.iter().map(|&i| self.parties[i]).collect(),
        }
    }

    /// Flat index of the joint measurement `xs` with joint outcome `outs`.
    pub fn index(&self, xs: &[usize], outs: &[usize]) -> usize {
        let mut idx = 0;
        for ((p, &x), &a) in self.parties.iter().zip(xs).zip(outs) {
            idx = idx * p.dim() + x * p.outcomes + a;
        }
        idx
    }

    /// Inverse of [`SystemType::index`].
    pub fn labels(&self, mut idx: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.parties.len();
        let mut xs = vec![0; n];
        let mut outs = vec![0; n];
        for i in (0..n).rev() {
            let p = self.parties[i];
            let local = idx % p.dim();
            idx /= p.dim();
            xs[i] = local / p.outcomes;
            outs[i] = local % p.outcomes;
        }
        (xs, outs)
    }

    /// Every joint measurement tuple in lexicographic order.
    pub fn measurement_tuples(&self) -> Vec<Vec<usize>> {
        tuples(
            &self
                .parties
                .iter()
                .map(|p| p.measurements)
                .collect::<Vec<_>>(),
        )
    }

    pub fn outcome_tuples(&self) -> Vec<Vec<usize>> {
        tuples(&self.parties.iter().map(|p| p.outcomes).collect::<Vec<_>>())
    }
}

/// All tuples `t` with `t[i] < radices[i]`, first coordinate slowest.
pub fn tuples(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

impl fmt::Display for SystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parties
            .iter()
            .map(|p| format!("({},{})", p.measurements, p.outcomes))
            .collect();
        write!(f, "{} {}", self.theory, parts.join("x"))
    }
}
