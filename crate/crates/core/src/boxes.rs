//! No-signalling boxes on gbits: the PR box, CHSH, vertex classes and
//! monogamy.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::Relabelling;
use crate::error::{GptError, Result};
use crate::lp::{solve_lp, LpStatus, Sense};
use crate::polytope::{Constraint, HRep};
use crate::rational::{dot, rat, serde_rational, serde_vector, Rational, Vector};
use crate::space::{state_space_hrep, vertices};
use crate::state::StateVector;
use crate::system::{Party, SystemType, Theory};

/// Quantum maximum of the CHSH functional in this normalization.
pub const TSIRELSON_BOUND: f64 = 2.0 + std::f64::consts::SQRT_2;

/// Exact comparison of `x` with `2 + √2`.
pub fn cmp_tsirelson(x: &Rational) -> std::cmp::Ordering {
    let d = x - Rational::from_integer(2.into());
    if d <= Rational::zero() {
        return std::cmp::Ordering::Less;
    }
    (&d * &d).cmp(&Rational::from_integer(2.into()))
}

/// The largest CHSH value of a local deterministic box lies strictly below
/// `2 + √2`, and the PR box strictly above.
pub fn tsirelson_between_local_and_algebraic() -> bool {
    use std::cmp::Ordering::{Greater, Less};
    let t = two_gbits();
    let local = crate::space::local_deterministic(&t)
        .into_iter()
        .map(|v| dot(&chsh_form(), &v))
        .max()
        .expect("local boxes exist");
    let pr = dot(&chsh_form(), &pr_state().entries);
    cmp_tsirelson(&local) == Less && cmp_tsirelson(&pr) == Greater
}

/// The no-signalling polytope of `parties` gbits.
#[derive(Debug, Clone)]
pub struct NsPolytope {
    pub system: SystemType,
    pub h: HRep,
}

impl NsPolytope {
    pub fn gbits(parties: usize) -> Result<Self> {
        let system = SystemType::gbits(Theory::Gnst, parties);
        let h = state_space_hrep(&system)?;
        Ok(NsPolytope { system, h })
    }

    pub fn vertices(&self) -> Result<Vec<Vector>> {
        vertices(&self.system)
    }
}

fn two_gbits() -> SystemType {
    SystemType::gbits(Theory::Gnst, 2)
}

fn check_two_gbits(p: &StateVector) -> Result<()> {
    let t = two_gbits();
    if p.entries.len() != t.dim() {
        return Err(GptError::DimensionMismatch {
            expected: t.dim(),
            found: p.entries.len(),
        });
    }
    if p.system.parties != t.parties {
        return Err(GptError::TheoryMismatch(format!(
            "expected two gbits, got {}",
            p.system
        )));
    }
    Ok(())
}

/// `P(a,b|x,y) = 1/2` when `a ⊕ b = x·y` (labels from zero).
pub fn pr_state() -> StateVector {
    let t = two_gbits();
    let mut v = vec![Rational::zero(); t.dim()];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                let b = a ^ (x & y);
                v[t.index(&[x, y], &[a, b])] = rat(1, 2);
            }
        }
    }
    StateVector {
        system: t,
        entries: v,
    }
}

/// Every entry `1/4`.
pub fn uniform_noise() -> StateVector {
    let t = two_gbits();
    let v = vec![rat(1, 4); t.dim()];
    StateVector {
        system: t,
        entries: v,
    }
}

/// `P(a=b|11) + P(a=b|12) + P(a=b|21) + P(a≠b|22)` as a linear form.
pub fn chsh_form() -> Vector {
    let t = two_gbits();
    let mut f = vec![Rational::zero(); t.dim()];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    if (a ^ b) == (x & y) {
                        f[t.index(&[x, y], &[a, b])] = Rational::one();
                    }
                }
            }
        }
    }
    f
}

pub fn chsh_value(p: &StateVector) -> Result<Rational> {
    check_two_gbits(p)?;
    Ok(dot(&chsh_form(), &p.entries))
}

/// Applies one relabelling per party, acting on each party's slot of the
/// composite index.
pub fn local_relabel(system: &SystemType, rels: &[&Relabelling], v: &[Rational]) -> Result<Vector> {
    if rels.len() != system.party_count() {
        return Err(GptError::InvalidSystem(format!(
            "{} relabellings for {} parties",
            rels.len(),
            system.party_count()
        )));
    }
    let dims: Vec<usize> = system.parties.iter().map(Party::dim).collect();
    let mut cur = v.to_vec();
    for (p, r) in rels.iter().enumerate() {
        if r.party != system.parties[p] {
            return Err(GptError::TheoryMismatch(format!(
                "relabelling does not match party {p}"
            )));
        }
        let stride: usize = dims[p + 1..].iter().product();
        let d = dims[p];
        let sources = r.sources();
        let mut next = vec![Rational::zero(); cur.len()];
        for base in 0..cur.len() {
            if !(base / stride).is_multiple_of(d) {
                continue;
            }
            for (o, src) in sources.iter().enumerate() {
                let mut acc = Rational::zero();
                for &s in src {
                    acc += &cur[base + s * stride];
                }
                next[base + o * stride] = acc;
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    Local,
    Nonlocal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedVertex {
    #[serde(with = "serde_vector")]
    pub vertex: Vector,
    pub class: VertexClass,
    #[serde(with = "serde_rational")]
    pub chsh: Rational,
    /// Largest value over the CHSH forms obtained by reversible local
    /// relabellings.
    #[serde(with = "serde_rational")]
    pub best_chsh: Rational,
    /// Relabellings taking this vertex to the PR box.
    pub to_pr: Option<(Relabelling, Relabelling)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCatalog {
    pub local: Vec<ClassifiedVertex>,
    pub nonlocal: Vec<ClassifiedVertex>,
}

impl VertexCatalog {
    pub fn all(&self) -> impl Iterator<Item = &ClassifiedVertex> {
        self.local.iter().chain(&self.nonlocal)
    }
}

fn is_product_deterministic(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero() || x.is_one())
}

/// Values of the CHSH form composed with every pair of reversible local
/// relabellings.
pub fn relabelled_chsh_values(p: &StateVector) -> Result<Vec<Rational>> {
    check_two_gbits(p)?;
    let rev: Vec<Relabelling> = Relabelling::all(Party::GBIT)
        .into_iter()
        .filter(Relabelling::is_reversible)
        .collect();
    let form = chsh_form();
    let mut out = Vec::with_capacity(rev.len() * rev.len());
    for ra in &rev {
        for rb in &rev {
            out.push(dot(
                &form,
                &local_relabel(&p.system, &[ra, rb], &p.entries)?,
            ));
        }
    }
    Ok(out)
}

/// Splits the two-gbit vertices into product-deterministic ones and the
/// rest, and finds for each of the rest a pair of relabellings onto the PR
/// box.
pub fn classify_vertices(n: &NsPolytope) -> Result<VertexCatalog> {
    if n.system.parties != two_gbits().parties {
        return Err(GptError::Unsupported(
            "vertex classification is for two gbits".into(),
        ));
    }
    let pr = pr_state().entries;
    let all = Relabelling::all(Party::GBIT);
    let mut catalog = VertexCatalog {
        local: Vec::new(),
        nonlocal: Vec::new(),
    };
    for v in n.vertices()? {
        let state = StateVector {
            system: n.system.clone(),
            entries: v.clone(),
        };
        let chsh = chsh_value(&state)?;
        let best_chsh = relabelled_chsh_values(&state)?
            .into_iter()
            .max()
            .expect("nonempty");
        if is_product_deterministic(&v) {
            catalog.local.push(ClassifiedVertex {
                vertex: v,
                class: VertexClass::Local,
                chsh,
                best_chsh,
                to_pr: None,
            });
            continue;
        }
        let mut to_pr = None;
        'search: for ra in &all {
            for rb in &all {
                if local_relabel(&n.system, &[ra, rb], &v)? == pr {
                    to_pr = Some((ra.clone(), rb.clone()));
                    break 'search;
                }
            }
        }
        catalog.nonlocal.push(ClassifiedVertex {
            vertex: v,
            class: VertexClass::Nonlocal,
            chsh,
            best_chsh,
            to_pr,
        });
    }
    Ok(catalog)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonogamyResult {
    /// `max |P(e = a | A measures 1, E measures 1) − 1/2|`.
    #[serde(with = "serde_rational")]
    pub optimum: Rational,
    #[serde(with = "serde_rational")]
    pub max_agreement: Rational,
    #[serde(with = "serde_rational")]
    pub min_agreement: Rational,
    /// An extension attaining the optimum.
    #[serde(with = "serde_vector")]
    pub extension: Vector,
}

/// Optimizes Eve's correlation with Alice's first fiducial outcome over all
/// no-signalling three-gbit extensions of `ab_marginal`.
pub fn monogamy_lp(ab_marginal: &StateVector) -> Result<MonogamyResult> {
    check_two_gbits(ab_marginal)?;
    let abe = SystemType::gbits(Theory::Gnst, 3);
    let mut h = state_space_hrep(&abe)?;
    let ab = two_gbits();
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut row = vec![Rational::zero(); abe.dim()];
                    for c in 0..2 {
                        row[abe.index(&[x, y, 0], &[a, b, c])] = Rational::one();
                    }
                    h.equalities.push(Constraint::new(
                        row,
                        ab_marginal.entries[ab.index(&[x, y], &[a, b])].clone(),
                    ));
                }
            }
        }
    }
    let mut agree = vec![Rational::zero(); abe.dim()];
    for a in 0..2 {
        for b in 0..2 {
            agree[abe.index(&[0, 0, 0], &[a, b, a])] = Rational::one();
        }
    }
    let hi = solve_lp(&agree, &h, Sense::Maximize)?;
    if hi.status == LpStatus::Infeasible {
        return Err(GptError::InfeasibleMarginal);
    }
    let lo = solve_lp(&agree, &h, Sense::Minimize)?;
    let (max_agreement, min_agreement) = match (hi.optimum, lo.optimum) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(GptError::Unbounded),
    };
    let half = rat(1, 2);
    let up = &max_agreement - &half;
    let down = &half - &min_agreement;
    let (optimum, extension) = if up >= down {
        (up, hi.witness)
    } else {
        (down, lo.witness)
    };
    Ok(MonogamyResult {
        optimum,
        max_agreement,
        min_agreement,
        extension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn pr_entries() {
        let pr = pr_state();
        assert_eq!(*pr.get(&[0, 0], &[0, 0]), rat(1, 2));
        assert_eq!(*pr.get(&[1, 1], &[0, 0]), int(0));
        assert_eq!(pr.norm().unwrap(), int(1));
    }

    #[test]
    fn chsh_reference_values() {
        assert_eq!(chsh_value(&pr_state()).unwrap(), int(4));
        assert_eq!(chsh_value(&uniform_noise()).unwrap(), int(2));
        let ones = StateVector::deterministic(two_gbits(), &[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(chsh_value(&ones).unwrap(), int(3));
        assert!(tsirelson_between_local_and_algebraic());
        assert_eq!(cmp_tsirelson(&rat(3414, 1000)), std::cmp::Ordering::Less);
    }

    #[test]
    fn identity_relabelling_is_noop() {
        let id = Relabelling::identity(Party::GBIT);
        let pr = pr_state();
        assert_eq!(
            local_relabel(&pr.system, &[&id, &id], &pr.entries).unwrap(),
            pr.entries
        );
    }
}
