//! Command reports and the certificates they carry.

use std::collections::BTreeMap;

use gpt_core::linalg::Matrix;
use gpt_core::lp::FarkasCertificate;
use gpt_core::polytope::HRep;
use gpt_core::rational::serde_vector;
use gpt_core::space::{is_allowed, is_member};
use gpt_core::{Result, StateVector, SystemType, Vector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A claim that can be re-checked without trusting the command that made it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Multipliers proving `hrep` empty.
    Infeasible {
        claim: String,
        hrep: HRep,
        multipliers: FarkasCertificate,
    },
    /// A point of `hrep`.
    Feasible {
        claim: String,
        hrep: HRep,
        #[serde(with = "serde_vector")]
        point: Vector,
    },
    /// A state of `system` whose image under `matrix` is not allowed.
    ImageViolation {
        claim: String,
        system: SystemType,
        matrix: Matrix,
        #[serde(with = "serde_vector")]
        input: Vector,
        #[serde(with = "serde_vector")]
        image: Vector,
    },
}

impl Certificate {
    pub fn claim(&self) -> &str {
        match self {
            Certificate::Infeasible { claim, .. }
            | Certificate::Feasible { claim, .. }
            | Certificate::ImageViolation { claim, .. } => claim,
        }
    }

    pub fn verify(&self) -> Result<bool> {
        match self {
            Certificate::Infeasible {
                hrep, multipliers, ..
            } => Ok(hrep.validate().is_ok() && multipliers.verify(hrep)),
            Certificate::Feasible { hrep, point, .. } => {
                Ok(hrep.validate().is_ok() && hrep.contains(point)?)
            }
            Certificate::ImageViolation {
                system,
                matrix,
                input,
                image,
                ..
            } => {
                if matrix.mul_vec(input)? != *image {
                    return Ok(false);
                }
                let state = StateVector::new(system.clone(), input.clone())?;
                Ok(is_member(&state, system)? && !is_allowed(image, system)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: String,
    pub arguments: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub verdicts: Vec<Verdict>,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    /// Wall-clock milliseconds per phase.
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
    pub version: String,
}

impl CommandReport {
    pub fn new(command: &str) -> Self {
        CommandReport {
            command: command.to_string(),
            arguments: Vec::new(),
            seed: None,
            verdicts: Vec::new(),
            certificates: Vec::new(),
            table: None,
            details: serde_json::Value::Null,
            timings: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn verdict(mut self, name: &str, value: impl ToString) -> Self {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            value: value.to_string(),
        });
        self
    }

    pub fn primary(&self) -> Option<&str> {
        self.verdicts.first().map(|v| v.value.as_str())
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table {
            header: header.iter().map(ToString::to_string).collect(),
            rows,
        });
        self
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).unwrap_or(serde_json::Value::Null);
        self
    }
}
