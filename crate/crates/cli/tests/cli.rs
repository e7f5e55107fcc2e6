use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpt"))
        .args(args)
        .env_remove("GPT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = gpt(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&ok(&a)).unwrap()
}

fn verdict<'a>(report: &'a Value, name: &str) -> &'a str {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .and_then(|v| v["value"].as_str())
        .unwrap_or_else(|| panic!("no verdict {name}"))
}

fn save(report: &Value) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), report.to_string()).unwrap();
    f
}

fn verify(report: &Value) -> bool {
    let f = save(report);
    gpt(&["verify-cert", f.path().to_str().unwrap()])
        .status
        .code()
        == Some(0)
}

#[test]
fn chsh_of_pr_box() {
    assert_eq!(ok(&["chsh", &data("pr.json")]), "4/1\n");
    assert_eq!(ok(&["chsh", &data("uniform.json")]), "2/1\n");
    ok(&["chsh", &data("pr.json"), "--expect", "4"]);
}

#[test]
fn two_gbit_vertices() {
    assert_eq!(ok(&["vertices", "gnst", "2"]).lines().count(), 24);
    let csv = ok(&["vertices", "gnst", "2", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 25);
    assert!(csv.starts_with("p_x00_a00,p_x00_a01,"));
    assert_eq!(ok(&["vertices", "glt", "2"]).lines().count(), 16);
}

#[test]
fn gbit_vertices() {
    let out = ok(&["vertices", "gnst", "1", "(2,2)"]);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(
        rows,
        [
            "0/1 1/1 0/1 1/1",
            "0/1 1/1 1/1 0/1",
            "1/1 0/1 0/1 1/1",
            "1/1 0/1 1/1 0/1"
        ]
    );
    assert_eq!(
        ok(&["vertices", "classical", "1", "1,3"]).lines().count(),
        3
    );
}

#[test]
fn expectation_exit_codes() {
    let pr = data("pr.json");
    assert_eq!(ok(&["member", &pr, "glt", "--expect", "false"]), "false\n");
    assert_eq!(
        gpt(&["member", &pr, "glt", "--expect", "true"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gpt(&["member", &pr, "gnst", "--expect", "true"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(gpt(&["member", &pr]).status.code(), Some(2));
    assert_eq!(gpt(&["member", &pr, "quantum"]).status.code(), Some(2));
    assert_eq!(gpt(&["chsh", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(gpt(&["vertices", "qubit", "1"]).status.code(), Some(2));
    assert_eq!(gpt(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn report_fields() {
    let r = json(&["member", &data("pr.json"), "glt"]);
    for key in [
        "command",
        "arguments",
        "verdicts",
        "certificates",
        "timings",
        "version",
    ] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["command"], "member");
    assert_eq!(r["arguments"][0], "member");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["certificates"][0]["kind"], "infeasible");
}

#[test]
fn membership_certificates_verify() {
    for (file, theory) in [
        ("pr.json", "glt"),
        ("pr.json", "gnst"),
        ("uniform.json", "glt"),
        ("signalling.json", "gnst"),
    ] {
        let r = json(&["member", &data(file), theory]);
        assert_eq!(r["certificates"].as_array().unwrap().len(), 1);
        assert!(verify(&r), "{file} in {theory}");
    }
}

#[test]
fn tampered_certificate_fails() {
    let mut r = json(&["member", &data("pr.json"), "glt"]);
    let m = &mut r["certificates"][0]["multipliers"]["equality_multipliers"];
    let first = m[0].as_str().unwrap().to_string();
    m[0] = Value::String(if first == "0/1" {
        "1/1".into()
    } else {
        "0/1".into()
    });
    assert!(!verify(&r));
    let f = save(&r);
    assert_eq!(
        ok(&[
            "verify-cert",
            f.path().to_str().unwrap(),
            "--expect",
            "false"
        ])
        .lines()
        .next(),
        Some("0 infeasible false state is not a member of glt (2,2)x(2,2)")
    );
}

#[test]
fn transformation_checks() {
    assert_eq!(
        ok(&["check-transform", &data("quarter_turn.json")])
            .lines()
            .next(),
        Some("true")
    );
    let r = json(&[
        "check-transform",
        &data("stretch.json"),
        "--expect",
        "false",
    ]);
    assert_eq!(r["certificates"][0]["kind"], "image_violation");
    assert!(verify(&r));
    let with = json(&[
        "check-transform",
        &data("quarter_turn.json"),
        "--ancilla",
        "2,2",
        "--ancilla",
        "3,2",
    ]);
    assert_eq!(verdict(&with, "well_defined"), "true");
    assert_eq!(with["details"]["ancillas"].as_array().unwrap().len(), 2);
}

#[test]
fn relabelling_decomposition() {
    let r = json(&["decompose", &data("half_turn_mix.json")]);
    assert_eq!(verdict(&r, "zero_residual"), "true");
    let rows = r["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|row| row[0] == "1/2"));
    assert_eq!(
        gpt(&["decompose", &data("stretch.json")]).status.code(),
        Some(2)
    );
}

#[test]
fn vertex_classes() {
    let r = json(&["classify-vertices"]);
    assert_eq!(verdict(&r, "vertices"), "24");
    assert_eq!(verdict(&r, "local"), "16");
    assert_eq!(verdict(&r, "nonlocal"), "8");
    let rows = r["table"]["rows"].as_array().unwrap();
    assert!(rows
        .iter()
        .filter(|row| row[0] == "nonlocal")
        .all(|row| row[2] == "4/1"));
    assert!(rows
        .iter()
        .filter(|row| row[0] == "local")
        .all(|row| row[2] == "3/1"));
}

#[test]
fn monogamy_values() {
    assert_eq!(
        ok(&["monogamy", &data("pr.json")]).lines().next(),
        Some("0/1")
    );
    assert_eq!(
        ok(&["monogamy", &data("noisy_pr.json")]).lines().next(),
        Some("1/4")
    );
    let r = json(&[
        "monogamy",
        &data("signalling.json"),
        "--expect",
        "infeasible",
    ]);
    assert_eq!(r["certificates"][0]["kind"], "infeasible");
    assert!(verify(&r));
}

#[test]
fn cloning() {
    let r = json(&["no-clone", "gnst", "--expect", "infeasible"]);
    assert_eq!(verdict(&r, "probabilistic_optimum"), "0/1");
    assert_eq!(r["certificates"].as_array().unwrap().len(), 4);
    assert!(verify(&r));
    let c = json(&["no-clone", "classical", "--expect", "feasible"]);
    assert_eq!(c["certificates"][0]["kind"], "feasible");
    assert!(verify(&c));
}

#[test]
fn exhaustive_searches() {
    ok(&["no-teleport", "--expect", "FAIL"]);
    ok(&["no-sdc", "--expect", "2"]);
    let r = json(&["no-sdc"]);
    assert_eq!(verdict(&r, "four_distinguishable"), "false");
}

#[test]
fn key_distribution() {
    let honest = json(&["kd", "--pairs", "10", "--seed", "3", "--expect", "true"]);
    assert_eq!(verdict(&honest, "detected_pairs"), "0");
    assert_eq!(verdict(&honest, "monogamy_bound"), "0/1");
    assert_eq!(honest["seed"], 3);
    let eve = json(&["kd", "--pairs", "400", "--eve", "x1", "--seed", "3"]);
    assert_eq!(verdict(&eve, "detection_probability"), "1/4");
    assert_ne!(verdict(&eve, "detected_pairs"), "0");
    assert_eq!(gpt(&["kd", "--pairs", "1"]).status.code(), Some(2));
    assert_eq!(gpt(&["kd", "--eve", "x3"]).status.code(), Some(2));
}

#[test]
fn seeds_come_from_the_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gpt"));
        c.args(["kd", "--pairs", "20", "--format", "json"]);
        match env {
            Some(s) => c.env("GPT_SEED", s),
            None => c.env_remove("GPT_SEED"),
        };
        let mut v: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v["timings"] = Value::Null;
        v
    };
    let a = run(Some("17"));
    assert_eq!(a["seed"], 17);
    assert_eq!(a["details"], run(Some("17"))["details"]);
    assert_eq!(run(None)["seed"], 0);
}

#[test]
fn oblivious_transfer() {
    for bits in ["00", "01", "10", "11"] {
        for c in ["0", "1"] {
            let r = json(&["ot", "--bits", bits, "--choice", c, "--expect", "true"]);
            let wanted = &bits[c.parse::<usize>().unwrap()..][..1];
            assert_eq!(verdict(&r, "bob_output"), wanted);
            assert_eq!(verdict(&r, "max_bits_revealed"), "1");
        }
    }
    assert_eq!(
        gpt(&["ot", "--bits", "012", "--choice", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn van_dam_inner_product() {
    let r = json(&[
        "vandam",
        "--fn",
        &data("ip2.hex"),
        "--n",
        "2",
        "--expect",
        "true",
    ]);
    assert_eq!(verdict(&r, "correct_pairs"), "16");
    assert_eq!(verdict(&r, "bits_communicated"), "1");
    // Inner product on two bits, written literally: x = 3, y = 1 gives 1.
    let one = json(&["vandam", "--fn", "6ca0", "--n", "2", "--x", "3", "--y", "1"]);
    assert_eq!(verdict(&one, "output"), "1");
    assert_eq!(verdict(&one, "correct"), "true");
}

#[test]
fn memory_recall() {
    let r = json(&["memory", "--fn", "a5", "--n", "3", "--expect", "true"]);
    assert_eq!(verdict(&r, "no_signalling"), "true");
    let stored: Vec<String> = r["table"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row[1].as_str().unwrap().to_string())
        .collect();
    assert_eq!(stored, ["1", "0", "1", "0", "0", "1", "0", "1"]);
}

#[test]
fn circuits_sample_close_to_the_oracle() {
    let circuit = data("circuit.json");
    assert_eq!(ok(&["oracle", &circuit]), "001 1/4\n010 1/4\n100 1/2\n");
    let r = json(&[
        "simulate",
        &circuit,
        "--shots",
        "100000",
        "--seed",
        "5",
        "--compare",
    ]);
    let tv: f64 = verdict(&r, "total_variation").parse().unwrap();
    assert!(tv <= 0.02, "tv {tv}");
    let again = json(&["simulate", &circuit, "--shots", "100000", "--seed", "5"]);
    assert_eq!(r["table"], again["table"]);
}

#[test]
fn text_output_is_deterministic() {
    for args in [
        vec!["classify-vertices"],
        vec!["kd", "--pairs", "30", "--eve", "x2:01:1001", "--seed", "8"],
        vec!["simulate", &data("circuit.json"), "--shots", "500"],
    ] {
        assert_eq!(ok(&args), ok(&args));
    }
}
