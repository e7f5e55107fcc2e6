//! One function per subcommand, each returning a report.

use std::path::Path;

use anyhow::{bail, Context};
use gpt_core::boxes::{chsh_value, classify_vertices, monogamy_lp, NsPolytope};
use gpt_core::circuits::{brute_force_distribution, simulate_glt, total_variation, Circuit};
use gpt_core::dynamics::{
    check_admissibility, cloning_lp, decompose_relabellings, no_cloning_check, Transformation,
};
use gpt_core::linalg::Matrix;
use gpt_core::lp::{combination_hrep, solve_lp, LpStatus, Sense};
use gpt_core::polytope::Constraint;
use gpt_core::protocols::{
    bits_from_hex, memory_recall, memory_recall_probability, memory_store, no_superdense_search,
    no_teleportation_search, run_key_distribution, run_oblivious_transfer, run_van_dam,
    van_dam_exhaustive, EveStrategy, ProtocolTranscript, TruthTable,
};
use gpt_core::qubit::{format_float, preserves_ball};
use gpt_core::rational::{format_rational, to_f64};
use gpt_core::space::{is_member, local_deterministic, state_space_hrep, vertices};
use gpt_core::{GptError, Party, Rational, StateVector, SystemType, Theory};
use num_traits::{One, Zero};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::report::{Certificate, CommandReport};

pub type Result<T> = anyhow::Result<T>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_state(path: &Path) -> Result<StateVector> {
    let raw: StateVector = read_json(path)?;
    Ok(StateVector::new(raw.system, raw.entries)?)
}

fn load_transformation(path: &Path) -> Result<Transformation> {
    let raw: Transformation = read_json(path)?;
    Ok(Transformation::new(raw.system, raw.matrix)?)
}

/// A hex table given literally or as a file holding one.
fn read_hex(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(text.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

/// Lower-case name a value serializes to.
fn name_of(v: impl Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn row(cells: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    cells.into_iter().map(|c| c.to_string()).collect()
}

fn digits(xs: &[usize]) -> String {
    xs.iter().map(ToString::to_string).collect()
}

fn entry_header(t: &SystemType) -> Vec<String> {
    (0..t.dim())
        .map(|i| {
            let (xs, outs) = t.labels(i);
            format!("p_x{}_a{}", digits(&xs), digits(&outs))
        })
        .collect()
}

fn default_party(theory: Theory) -> Party {
    match theory {
        Theory::Classical => Party::new(1, 2),
        Theory::Qubit => Party::new(3, 2),
        _ => Party::GBIT,
    }
}

/// An LP certificate for `p ∈ S(t)` or its negation; none for qubits.
pub fn membership_certificate(p: &[Rational], t: &SystemType) -> Result<Option<Certificate>> {
    if t.theory == Theory::Qubit {
        return Ok(None);
    }
    let h = if t.theory == Theory::Glt && !t.is_single() {
        combination_hrep(&local_deterministic(t), &[], p, true)
    } else {
        let mut h = state_space_hrep(t)?;
        for (i, x) in p.iter().enumerate() {
            let mut e = vec![Rational::zero(); t.dim()];
            e[i] = Rational::one();
            h.equalities.push(Constraint::new(e, x.clone()));
        }
        h
    };
    let r = solve_lp(&vec![Rational::zero(); h.ambient_dim], &h, Sense::Minimize)?;
    Ok(match r.status {
        LpStatus::Optimal => Some(Certificate::Feasible {
            claim: format!("state is a member of {t}"),
            hrep: h,
            point: r.witness,
        }),
        _ => r.certificate.map(|m| Certificate::Infeasible {
            claim: format!("state is not a member of {t}"),
            hrep: h,
            multipliers: m,
        }),
    })
}

pub fn vertices_cmd(theory: Theory, parties: usize, party: Option<Party>) -> Result<CommandReport> {
    let party = party.unwrap_or_else(|| default_party(theory));
    let t = SystemType::new(theory, vec![party; parties])?;
    let vs = vertices(&t)?;
    let rows = vs
        .iter()
        .map(|v| row(v.iter().map(format_rational)))
        .collect();
    let header = entry_header(&t);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(CommandReport::new("vertices")
        .verdict("vertices", vs.len())
        .with_table(&header, rows))
}

pub fn member(state: &Path, theory: Theory) -> Result<CommandReport> {
    let p = load_state(state)?;
    let t = p.system.with_theory(theory);
    let q = StateVector::new(t.clone(), p.entries.clone())?;
    let member = is_member(&q, &t)?;
    let mut report = CommandReport::new("member").verdict("member", member);
    if let Some(c) = membership_certificate(&q.entries, &t)? {
        report.certificates.push(c);
    }
    Ok(report)
}

fn qubit_matrix(m: &Matrix) -> Result<[[f64; 6]; 6]> {
    if m.rows() != 6 || m.cols() != 6 {
        bail!("a qubit map is a 6 x 6 matrix");
    }
    let mut out = [[0.0; 6]; 6];
    for (i, r) in out.iter_mut().enumerate() {
        for (j, x) in r.iter_mut().enumerate() {
            *x = to_f64(m.get(i, j));
        }
    }
    Ok(out)
}

pub fn check_transform(matrix: &Path, ancilla: &[Party]) -> Result<CommandReport> {
    let t = load_transformation(matrix)?;
    if t.system.theory == Theory::Qubit {
        let ok = preserves_ball(&qubit_matrix(&t.matrix)?);
        return Ok(CommandReport::new("check-transform")
            .verdict("well_defined", ok)
            .verdict("scope", "single qubit, float test"));
    }
    let ancillas = ancilla
        .iter()
        .map(|p| SystemType::new(t.system.theory, vec![*p]))
        .collect::<gpt_core::Result<Vec<_>>>()?;
    let a = check_admissibility(&t, &ancillas)?;
    let mut report = CommandReport::new("check-transform")
        .verdict("well_defined", a.well_defined)
        .verdict("normalization_preserving", a.normalization_preserving);
    if let Some(f) = a.failure.as_ref().filter(|f| !f.input.is_empty()) {
        let (system, full) = match &f.ancilla {
            None => (t.system.clone(), t.matrix.clone()),
            Some(anc) => (
                t.system.compose(anc)?,
                t.matrix.kron(&Matrix::identity(anc.dim())),
            ),
        };
        report.certificates.push(Certificate::ImageViolation {
            claim: f.reason.clone(),
            system,
            matrix: full,
            input: f.input.clone(),
            image: f.image.clone(),
        });
    }
    Ok(report.with_details(&a))
}

/// Outcome map of a 0/1 column-stochastic matrix as a digit string.
fn outcome_map(m: &Matrix) -> String {
    (0..m.cols())
        .map(|a| {
            (0..m.rows())
                .find(|&r| m.get(r, a).is_one())
                .map_or_else(|| "?".to_string(), |r| r.to_string())
        })
        .collect()
}

pub fn decompose(matrix: &Path) -> Result<CommandReport> {
    let t = load_transformation(matrix)?;
    let dec = decompose_relabellings(&t)?;
    let rows = dec
        .terms
        .iter()
        .map(|term| {
            row([
                format_rational(&term.weight),
                digits(&term.measurement_map),
                term.outcome_matrices
                    .iter()
                    .map(outcome_map)
                    .collect::<Vec<_>>()
                    .join(" "),
            ])
        })
        .collect();
    Ok(CommandReport::new("decompose")
        .verdict("zero_residual", dec.has_zero_residual())
        .verdict("terms", dec.terms.len())
        .with_table(&["weight", "measurement_map", "outcome_maps"], rows)
        .with_details(&dec))
}

pub fn chsh(state: &Path) -> Result<CommandReport> {
    let p = load_state(state)?;
    Ok(CommandReport::new("chsh").verdict("chsh", format_rational(&chsh_value(&p)?)))
}

pub fn classify() -> Result<CommandReport> {
    let cat = classify_vertices(&NsPolytope::gbits(2)?)?;
    let rows = cat
        .all()
        .map(|c| {
            let mut r = row([
                name_of(c.class),
                format_rational(&c.chsh),
                format_rational(&c.best_chsh),
            ]);
            r.extend(c.vertex.iter().map(format_rational));
            r
        })
        .collect();
    let t = SystemType::gbits(Theory::Gnst, 2);
    let mut header = vec!["class".to_string(), "chsh".into(), "best_chsh".into()];
    header.extend(entry_header(&t));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(CommandReport::new("classify-vertices")
        .verdict("vertices", cat.local.len() + cat.nonlocal.len())
        .verdict("local", cat.local.len())
        .verdict("nonlocal", cat.nonlocal.len())
        .with_table(&header, rows))
}

pub fn monogamy(state: &Path) -> Result<CommandReport> {
    let p = load_state(state)?;
    match monogamy_lp(&p) {
        Ok(r) => Ok(CommandReport::new("monogamy")
            .verdict("optimum", format_rational(&r.optimum))
            .verdict("max_agreement", format_rational(&r.max_agreement))
            .verdict("min_agreement", format_rational(&r.min_agreement))
            .with_details(&r)),
        Err(GptError::InfeasibleMarginal) => {
            let mut report = CommandReport::new("monogamy").verdict("optimum", "infeasible");
            let t = SystemType::gbits(Theory::Gnst, 2);
            if let Some(c) = membership_certificate(&p.entries, &t)? {
                report.certificates.push(c);
            }
            Ok(report)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn no_clone(theory: Theory, party: Option<Party>) -> Result<CommandReport> {
    let party = party.unwrap_or_else(|| default_party(theory));
    let t = SystemType::new(theory, vec![party])?;
    let r = no_cloning_check(&t)?;
    let mut report = CommandReport::new("no-clone");
    let mut any_feasible = false;
    let mut best = Rational::zero();
    let mut rows = Vec::new();
    for v in &r.verdicts {
        let hrep = cloning_lp(&t, &v.standard, true)?;
        any_feasible |= v.deterministic_feasible;
        best = best.max(v.probabilistic_optimum.clone());
        if let Some(m) = &v.witness_map {
            report.certificates.push(Certificate::Feasible {
                claim: "a deterministic cloning map exists".into(),
                hrep,
                point: m.to_rows().concat(),
            });
        } else if let Some(c) = &v.certificate {
            report.certificates.push(Certificate::Infeasible {
                claim: "no deterministic cloning map for this blank state".into(),
                hrep,
                multipliers: c.clone(),
            });
        }
        rows.push(row([
            v.standard
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(" "),
            v.deterministic_feasible.to_string(),
            v.certificate_verified.to_string(),
            format_rational(&v.probabilistic_optimum),
        ]));
    }
    let cloning = if any_feasible {
        "feasible"
    } else {
        "infeasible"
    };
    Ok(report
        .verdict("cloning", cloning)
        .verdict("probabilistic_optimum", format_rational(&best))
        .verdict("blank_states", r.verdicts.len())
        .with_table(
            &[
                "blank_state",
                "deterministic_feasible",
                "certificate_verified",
                "probabilistic_optimum",
            ],
            rows,
        ))
}

pub fn no_teleport() -> Result<CommandReport> {
    let r = no_teleportation_search()?;
    Ok(CommandReport::new("no-teleport")
        .verdict("teleportation", name_of(r.verdict))
        .verdict("known_state", name_of(r.known_state))
        .verdict("no_box", name_of(r.no_box))
        .verdict("strategies", r.alice_strategies)
        .verdict("checks", r.checks)
        .with_details(&r))
}

pub fn no_sdc() -> Result<CommandReport> {
    let r = no_superdense_search()?;
    Ok(CommandReport::new("no-sdc")
        .verdict("max_distinguishable", r.pr.max_distinguishable)
        .verdict("four_distinguishable", r.pr.four_distinguishable)
        .verdict("product_max_distinguishable", r.product.max_distinguishable)
        .with_details(&r))
}

pub fn kd(
    pairs: usize,
    eve: Option<&EveStrategy>,
    test_fraction: f64,
    seed: u64,
) -> Result<CommandReport> {
    let tr = run_key_distribution(pairs, test_fraction, eve, seed)?;
    let v = &tr.verdict;
    let mut report = CommandReport::new("kd")
        .verdict("keys_match", v.keys_match)
        .verdict("detected_pairs", v.detected_pairs)
        .verdict("tested_pairs", v.tested_pairs)
        .verdict(
            "detection_probability",
            format_rational(&v.detection_probability),
        );
    if let Some(b) = &v.monogamy_bound {
        report = report.verdict("monogamy_bound", format_rational(b));
    }
    Ok(report.with_details(&tr))
}

fn parse_bit_pair(bits: &str) -> Result<(u8, u8)> {
    let b: Vec<u8> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(anyhow::anyhow!(
                "bits are written as two binary digits, got {bits:?}"
            )),
        })
        .collect::<Result<_>>()?;
    match b[..] {
        [b0, b1] => Ok((b0, b1)),
        _ => bail!("bits are written as two binary digits, got {bits:?}"),
    }
}

pub fn ot(bits: &str, choice: u8, seed: u64) -> Result<CommandReport> {
    let tr = run_oblivious_transfer(parse_bit_pair(bits)?, choice, seed)?;
    let v = &tr.verdict;
    let report = CommandReport::new("ot")
        .verdict("correct", v.correct)
        .verdict("bob_output", v.bob_output)
        .verdict("alice_view_independent", v.alice_view_independent)
        .verdict("max_bits_revealed", v.audit.max_bits_revealed)
        .verdict("max_leakage_bits", format_float(v.audit.max_leakage_bits));
    Ok(report.with_details(&tr))
}

pub fn vandam(
    hex: &str,
    n: usize,
    input: Option<(usize, usize)>,
    seed: u64,
) -> Result<CommandReport> {
    let f = TruthTable::from_hex(&read_hex(hex)?, n)?;
    match input {
        Some((x, y)) => {
            let tr: ProtocolTranscript<_> = run_van_dam(&f, x, y, seed)?;
            let v = &tr.verdict;
            let report = CommandReport::new("vandam")
                .verdict("correct", v.correct)
                .verdict("output", u8::from(v.output))
                .verdict("expected", u8::from(v.expected))
                .verdict("boxes_used", v.boxes_used)
                .verdict("bits_communicated", v.bits_communicated);
            Ok(report.with_details(&tr))
        }
        None => {
            let a = van_dam_exhaustive(&f, seed)?;
            Ok(CommandReport::new("vandam")
                .verdict("all_correct", a.all_correct)
                .verdict("correct_pairs", a.correct_pairs)
                .verdict("input_pairs", a.input_pairs)
                .verdict("boxes_per_run", a.boxes_per_run)
                .verdict("bits_communicated", a.bits_communicated)
                .with_details(&a))
        }
    }
}

pub fn memory(hex: &str, n: usize, seed: u64) -> Result<CommandReport> {
    if n == 0 || n >= usize::BITS as usize {
        bail!("memory needs between 1 and {} gbits", usize::BITS - 1);
    }
    let bits = bits_from_hex(&read_hex(hex)?, 1 << n)?;
    let state = memory_store(&bits, n)?;
    let no_signalling = state.check_no_signalling().is_ok();
    let mut all = true;
    let mut rows = Vec::new();
    for (i, &b) in bits.iter().enumerate() {
        let tr = memory_recall(&state, i, seed.wrapping_add(i as u64))?;
        let ok = tr.verdict.recalled == b;
        all &= ok;
        rows.push(row([
            i.to_string(),
            u8::from(b).to_string(),
            u8::from(tr.verdict.recalled).to_string(),
            format_rational(&memory_recall_probability(&state, i, b)),
        ]));
    }
    Ok(CommandReport::new("memory")
        .verdict("all_recalled", all)
        .verdict("no_signalling", no_signalling)
        .verdict("addresses", bits.len())
        .with_table(
            &["address", "stored", "recalled", "recall_probability"],
            rows,
        ))
}

pub fn simulate(circuit: &Path, shots: u64, seed: u64, compare: bool) -> Result<CommandReport> {
    let c = Circuit::from_file(circuit)?;
    let hist = simulate_glt(&c, seed, shots)?;
    let rows = hist
        .iter()
        .map(|(k, &n)| {
            row([
                digits(k),
                n.to_string(),
                format_float(n as f64 / shots.max(1) as f64),
            ])
        })
        .collect();
    let mut report = CommandReport::new("simulate")
        .verdict("shots", shots)
        .verdict("outcomes", hist.len());
    if compare {
        let exact = brute_force_distribution(&c)?;
        report = report.verdict(
            "total_variation",
            format_float(total_variation(&hist, &exact)),
        );
    }
    Ok(report.with_table(&["outcome", "count", "frequency"], rows))
}

pub fn oracle(circuit: &Path) -> Result<CommandReport> {
    let c = Circuit::from_file(circuit)?;
    let dist = brute_force_distribution(&c)?;
    let rows = dist
        .iter()
        .map(|(k, p)| row([digits(k), format_rational(p)]))
        .collect();
    Ok(CommandReport::new("oracle")
        .verdict("outcomes", dist.len())
        .with_table(&["outcome", "probability"], rows))
}

/// Accepts a report, a list of certificates or a single certificate.
pub fn verify_cert(file: &Path) -> Result<CommandReport> {
    let value: serde_json::Value = read_json(file)?;
    let certs: Vec<Certificate> = match value {
        serde_json::Value::Object(ref o) if o.contains_key("certificates") => {
            serde_json::from_value(o["certificates"].clone())?
        }
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    let mut all = true;
    let mut rows = Vec::new();
    for (i, c) in certs.iter().enumerate() {
        let ok = c.verify().unwrap_or(false);
        all &= ok;
        let kind = serde_json::to_value(c)?
            .get("kind")
            .and_then(|k| k.as_str().map(String::from))
            .unwrap_or_default();
        rows.push(row([
            i.to_string(),
            kind,
            ok.to_string(),
            c.claim().to_string(),
        ]));
    }
    Ok(CommandReport::new("verify-cert")
        .verdict("verified", all)
        .verdict("certificates", certs.len())
        .with_table(&["index", "kind", "verified", "claim"], rows))
}
