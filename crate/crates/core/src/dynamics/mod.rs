//! Transformations, operations and admissibility.

mod gallery;
mod relabel;
mod theorems;

pub use gallery::{
    cube_universal_not, fig2_rotation, fig3_shrink, fig4_rotation, gbit_affine, SQRT_HALF_APPROX,
};
pub use relabel::{
    canonicalize_effect, decompose_measurement, decompose_relabellings, measurement_distribution,
    MeasurementDecomposition, MeasurementTerm, Relabelling, RelabellingDecomposition,
    RelabellingTerm,
};
pub use theorems::{
    affine_dimension, classical_copy_map, cloning_lp, disturbance_decomposition, is_classical,
    no_cloning_check, Block, CloningReport, CloningVerdict, DirectSumDecomposition,
};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::linalg::Matrix;
use crate::lp::{solve_lp, LpStatus, Sense};
use crate::polytope::HRep;
use crate::rational::{serde_vector, Rational, Vector};
use crate::space::{allowed_hrep, is_allowed, local_deterministic, state_space_hrep, vertices};
use crate::state::StateVector;
use crate::system::{Party, SystemType, Theory};

/// A linear map on state vectors of `system`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transformation {
    pub system: SystemType,
    pub matrix: Matrix,
}

impl Transformation {
    pub fn new(system: SystemType, matrix: Matrix) -> Result<Self> {
        system.validate()?;
        let d = system.dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(GptError::DimensionMismatch {
                expected: d,
                found: if matrix.rows() != d {
                    matrix.rows()
                } else {
                    matrix.cols()
                },
            });
        }
        Ok(Transformation { system, matrix })
    }

    pub fn identity(system: SystemType) -> Self {
        let d = system.dim();
        Transformation {
            system,
            matrix: Matrix::identity(d),
        }
    }

    pub fn apply(&self, p: &StateVector) -> Result<StateVector> {
        apply(self, p)
    }

    /// `|M·v| = |v|` on the state set. Norms are affine, and the
    /// product-deterministic states span the same affine hull.
    pub fn is_normalization_preserving(&self) -> Result<bool> {
        for v in spanning_states(&self.system)? {
            let img = StateVector {
                system: self.system.clone(),
                entries: self.matrix.mul_vec(&v)?,
            };
            if !img.norm().is_ok_and(|c| c.is_one()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A set of branches `{M_i}` whose norms add up to the input norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub branches: Vec<Transformation>,
}

impl Operation {
    /// `Σ_i |M_i·v| = |v|` exactly on every vertex.
    pub fn is_complete(&self) -> Result<bool> {
        let Some(first) = self.branches.first() else {
            return Ok(false);
        };
        let t = &first.system;
        for v in spanning_states(t)? {
            let mut total = Rational::zero();
            for b in &self.branches {
                if &b.system != t {
                    return Err(GptError::TheoryMismatch(
                        "branches act on different systems".into(),
                    ));
                }
                let img = StateVector {
                    system: t.clone(),
                    entries: b.matrix.mul_vec(&v)?,
                };
                total += img.norm()?;
            }
            if !total.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn apply(t: &Transformation, p: &StateVector) -> Result<StateVector> {
    if p.entries.len() != t.matrix.cols() {
        return Err(GptError::DimensionMismatch {
            expected: t.matrix.cols(),
            found: p.entries.len(),
        });
    }
    Ok(StateVector {
        system: p.system.clone(),
        entries: t.matrix.mul_vec(&p.entries)?,
    })
}

/// Places a map acting on the parties `targets` (in gate order) of
/// `composite`, identity elsewhere.
pub fn embed(gate: &Matrix, composite: &SystemType, targets: &[usize]) -> Result<Matrix> {
    let n = composite.party_count();
    if targets.iter().any(|&t| t >= n) {
        return Err(GptError::InvalidSystem(format!(
            "targets {targets:?} out of range"
        )));
    }
    let mut seen = vec![false; n];
    for &t in targets {
        if std::mem::replace(&mut seen[t], true) {
            return Err(GptError::InvalidSystem(format!(
                "repeated target in {targets:?}"
            )));
        }
    }
    let gate_sys = composite.subsystem(targets);
    if gate.rows() != gate_sys.dim() || gate.cols() != gate_sys.dim() {
        return Err(GptError::DimensionMismatch {
            expected: gate_sys.dim(),
            found: gate.rows(),
        });
    }
    let rest: Vec<usize> = (0..n).filter(|p| !targets.contains(p)).collect();
    let rest_sys = composite.subsystem(&rest);
    let split = |idx: usize| {
        let (xs, outs) = composite.labels(idx);
        let gx: Vec<usize> = targets.iter().map(|&p| xs[p]).collect();
        let ga: Vec<usize> = targets.iter().map(|&p| outs[p]).collect();
        let rx: Vec<usize> = rest.iter().map(|&p| xs[p]).collect();
        let ra: Vec<usize> = rest.iter().map(|&p| outs[p]).collect();
        (
            gate_sys.index(&gx, &ga),
            if rest.is_empty() {
                0
            } else {
                rest_sys.index(&rx, &ra)
            },
        )
    };
    let d = composite.dim();
    let parts: Vec<(usize, usize)> = (0..d).map(split).collect();
    let mut out = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if parts[i].1 == parts[j].1 {
                let v = gate.get(parts[i].0, parts[j].0);
                if !v.is_zero() {
                    out.set(i, j, v.clone());
                }
            }
        }
    }
    Ok(out)
}

/// `M` on party `target` of `n_parties` copies of `t.system`'s single party.
pub fn lift(t: &Transformation, n_parties: usize, target: usize) -> Result<Transformation> {
    if !t.system.is_single() {
        return Err(GptError::InvalidSystem(
            "lift expects a single-party map".into(),
        ));
    }
    let composite = SystemType::new(t.system.theory, vec![t.system.parties[0]; n_parties])?;
    let matrix = embed(&t.matrix, &composite, &[target])?;
    Ok(Transformation {
        system: composite,
        matrix,
    })
}

/// One gbit in the same theory, or one classical bit for classical systems.
pub fn default_ancilla(t: &SystemType) -> Result<SystemType> {
    match t.theory {
        Theory::Qubit => Err(GptError::Unsupported("composite qubit systems".into())),
        Theory::Classical => Ok(SystemType::classical(2)),
        theory => Ok(SystemType {
            theory,
            parties: vec![Party::GBIT],
        }),
    }
}

/// Where an admissibility check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityFailure {
    pub ancilla: Option<SystemType>,
    #[serde(with = "serde_vector")]
    pub input: Vector,
    #[serde(with = "serde_vector")]
    pub image: Vector,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub well_defined: bool,
    pub normalization_preserving: bool,
    pub ancillas: Vec<SystemType>,
    pub failure: Option<AdmissibilityFailure>,
}

pub fn is_well_defined(t: &Transformation, ancillas: &[SystemType]) -> Result<bool> {
    Ok(check_admissibility(t, ancillas)?.well_defined)
}

/// Exact vertex count of the composite used for the vertex-image test; larger
/// composites fall back to LP containment of the image.
const VERTEX_TEST_PARTIES: usize = 2;

fn vertex_test(t: &SystemType) -> bool {
    t.party_count() <= VERTEX_TEST_PARTIES || t.theory != Theory::Gnst
}

fn spanning_states(t: &SystemType) -> Result<Vec<Vector>> {
    if t.theory == Theory::Qubit {
        return vertices(t);
    }
    t.validate()?;
    Ok(local_deterministic(t))
}

/// Checks that `M` maps the state set into allowed states, and that
/// `M ⊗ I` does the same on each `system ⊗ ancilla`. An empty ancilla list
/// means the default single ancilla.
pub fn check_admissibility(t: &Transformation, ancillas: &[SystemType]) -> Result<Admissibility> {
    if t.system.theory == Theory::Qubit {
        return Err(GptError::Unsupported(
            "admissibility of qubit maps needs composite qubit systems".into(),
        ));
    }
    let ancillas: Vec<SystemType> = if ancillas.is_empty() {
        vec![default_ancilla(&t.system)?]
    } else {
        ancillas.to_vec()
    };
    let normalization_preserving = t.is_normalization_preserving()?;
    let mut report = Admissibility {
        well_defined: true,
        normalization_preserving,
        ancillas: ancillas.clone(),
        failure: None,
    };
    if vertex_test(&t.system) {
        for v in vertices(&t.system)? {
            let img = t.matrix.mul_vec(&v)?;
            if !is_allowed(&img, &t.system)? {
                report.well_defined = false;
                report.failure = Some(AdmissibilityFailure {
                    ancilla: None,
                    input: v,
                    image: img,
                    reason: "image of a pure state is not an allowed state".into(),
                });
                return Ok(report);
            }
        }
    } else if let Some(reason) = image_violation(
        &t.matrix,
        &state_space_hrep(&t.system)?,
        &local_deterministic(&t.system),
        &allowed_hrep(&t.system)?,
    )? {
        report.well_defined = false;
        report.failure = Some(AdmissibilityFailure {
            ancilla: None,
            input: Vec::new(),
            image: Vec::new(),
            reason,
        });
        return Ok(report);
    }
    for anc in &ancillas {
        let anc = anc.with_theory(t.system.theory);
        let composite = t.system.compose(&anc)?;
        let lifted = t.matrix.kron(&Matrix::identity(anc.dim()));
        if vertex_test(&composite) {
            for v in vertices(&composite)? {
                let img = lifted.mul_vec(&v)?;
                if !is_allowed(&img, &composite)? {
                    report.well_defined = false;
                    report.failure = Some(AdmissibilityFailure {
                        ancilla: Some(anc.clone()),
                        input: v,
                        image: img,
                        reason: "image of a composite pure state is not an allowed state".into(),
                    });
                    return Ok(report);
                }
            }
        } else if let Some(reason) = image_violation(
            &lifted,
            &state_space_hrep(&composite)?,
            &local_deterministic(&composite),
            &allowed_hrep(&composite)?,
        )? {
            report.well_defined = false;
            report.failure = Some(AdmissibilityFailure {
                ancilla: Some(anc.clone()),
                input: Vec::new(),
                image: Vec::new(),
                reason,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// Decides `M·source ⊆ target` row by row. `source` must be nonnegative and
/// `spanning` must affinely span it.
fn image_violation(
    m: &Matrix,
    source: &HRep,
    spanning: &[Vector],
    target: &HRep,
) -> Result<Option<String>> {
    for (i, row) in target.equalities.iter().enumerate() {
        let pulled = m.left_mul_vec(&row.coefficients)?;
        if spanning
            .iter()
            .any(|v| crate::rational::dot(&pulled, v) != row.constant)
        {
            return Ok(Some(format!("image violates equality row {i}")));
        }
    }
    for (i, row) in target.inequalities.iter().enumerate() {
        let pulled = m.left_mul_vec(&row.coefficients)?;
        if pulled.iter().all(|x| !x.is_negative()) && !row.constant.is_positive() {
            continue;
        }
        let r = solve_lp(&pulled, source, Sense::Minimize)?;
        let ok = match r.status {
            LpStatus::Optimal => r.optimum.is_some_and(|v| v >= row.constant),
            LpStatus::Infeasible => true,
            LpStatus::Unbounded => false,
        };
        if !ok {
            return Ok(Some(format!("image violates inequality row {i}")));
        }
    }
    Ok(None)
}
