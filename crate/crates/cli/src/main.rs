//! `gpt`: exact checks and protocol runs for generalized probabilistic
//! theories.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gpt_core::protocols::EveStrategy;
use gpt_core::rational::parse_rational;
use gpt_core::{Party, Theory};

use report::CommandReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "gpt",
    version,
    about = "Exact checks and protocol runs for generalized probabilistic theories"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Expected value of the first verdict; exit 1 when it differs.
    #[arg(long, global = true)]
    expect: Option<String>,
    #[command(subcommand)]
    command: Command,
}

fn theory(s: &str) -> Result<Theory, String> {
    s.parse().map_err(|e: gpt_core::GptError| e.to_string())
}

/// `M,K`, `(M,K)` or `MxK`: M fiducial measurements with K outcomes each.
fn party(s: &str) -> Result<Party, String> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split([',', 'x']).map(str::trim).collect();
    match parts[..] {
        [m, k] => {
            let m: usize = m.parse().map_err(|_| format!("bad party {s:?}"))?;
            let k: usize = k.parse().map_err(|_| format!("bad party {s:?}"))?;
            if m == 0 || k == 0 {
                return Err(format!("bad party {s:?}"));
            }
            Ok(Party::new(m, k))
        }
        _ => Err(format!("bad party {s:?}: expected M,K")),
    }
}

fn eve(s: &str) -> Result<EveStrategy, String> {
    s.parse().map_err(|e: gpt_core::GptError| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pure states of a theory's system of identical parties.
    Vertices {
        #[arg(value_parser = theory)]
        theory: Theory,
        parties: usize,
        /// Party type M,K (default 2,2; classical 1,2).
        #[arg(value_parser = party)]
        party: Option<Party>,
    },
    /// Whether a state file lies in a theory's state set.
    Member {
        state: PathBuf,
        #[arg(value_parser = theory)]
        theory: Theory,
    },
    /// Admissibility of a transformation, including on ancillas.
    CheckTransform {
        matrix: PathBuf,
        /// Ancilla party M,K; repeatable. Defaults to one gbit (one bit if classical).
        #[arg(long, value_parser = party)]
        ancilla: Vec<Party>,
    },
    /// Relabelling decomposition of a single-system transformation.
    Decompose { matrix: PathBuf },
    /// CHSH value of a two-gbit state.
    Chsh { state: PathBuf },
    /// Local and nonlocal vertices of the two-gbit no-signalling polytope.
    ClassifyVertices,
    /// Best correlation a third party can have with a two-gbit marginal.
    Monogamy { state: PathBuf },
    /// Deterministic and probabilistic cloning LPs for a single system.
    NoClone {
        #[arg(value_parser = theory)]
        theory: Theory,
        #[arg(long, value_parser = party)]
        party: Option<Party>,
    },
    /// Exhaustive teleportation search through one PR box.
    NoTeleport,
    /// Exhaustive superdense coding search on a PR box.
    NoSdc,
    /// Key distribution from PR boxes, optionally under intercept-resend.
    Kd {
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        /// x1|x2[:f0f1[:r00r01r10r11]].
        #[arg(long, value_parser = eve)]
        eve: Option<EveStrategy>,
        #[arg(long, default_value_t = 0.25)]
        test_fraction: f64,
        #[arg(long, env = "GPT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Oblivious transfer of two bits through one gbit.
    Ot {
        /// b0b1, e.g. 01.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        choice: u8,
        #[arg(long, env = "GPT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// One-bit evaluation of a two-party function with PR boxes.
    Vandam {
        /// Truth table in hex, or a file holding it.
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: usize,
        /// Run a single input pair instead of all of them.
        #[arg(long, requires = "y")]
        x: Option<usize>,
        #[arg(long, requires = "x")]
        y: Option<usize>,
        #[arg(long, env = "GPT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Store a bit string in n gbits and recall every address.
    Memory {
        /// Bit string in hex, or a file holding it.
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long, env = "GPT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Sample a GLT circuit.
    Simulate {
        circuit: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, env = "GPT_SEED", default_value_t = 0)]
        seed: u64,
        /// Also report total variation against the exact distribution.
        #[arg(long)]
        compare: bool,
    },
    /// Exact output distribution of a circuit.
    Oracle { circuit: PathBuf },
    /// Re-check the certificates of a saved JSON report.
    VerifyCert { file: PathBuf },
}

impl Command {
    fn seed(&self) -> Option<u64> {
        match self {
            Command::Kd { seed, .. }
            | Command::Ot { seed, .. }
            | Command::Vandam { seed, .. }
            | Command::Memory { seed, .. }
            | Command::Simulate { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    fn run(&self) -> anyhow::Result<CommandReport> {
        use commands as c;
        match self {
            Command::Vertices {
                theory,
                parties,
                party,
            } => c::vertices_cmd(*theory, *parties, *party),
            Command::Member { state, theory } => c::member(state, *theory),
            Command::CheckTransform { matrix, ancilla } => c::check_transform(matrix, ancilla),
            Command::Decompose { matrix } => c::decompose(matrix),
            Command::Chsh { state } => c::chsh(state),
            Command::ClassifyVertices => c::classify(),
            Command::Monogamy { state } => c::monogamy(state),
            Command::NoClone { theory, party } => c::no_clone(*theory, *party),
            Command::NoTeleport => c::no_teleport(),
            Command::NoSdc => c::no_sdc(),
            Command::Kd {
                pairs,
                eve,
                test_fraction,
                seed,
            } => c::kd(*pairs, eve.as_ref(), *test_fraction, *seed),
            Command::Ot { bits, choice, seed } => c::ot(bits, *choice, *seed),
            Command::Vandam {
                function,
                n,
                x,
                y,
                seed,
            } => c::vandam(function, *n, x.zip(*y), *seed),
            Command::Memory { function, n, seed } => c::memory(function, *n, *seed),
            Command::Simulate {
                circuit,
                shots,
                seed,
                compare,
            } => c::simulate(circuit, *shots, *seed, *compare),
            Command::Oracle { circuit } => c::oracle(circuit),
            Command::VerifyCert { file } => c::verify_cert(file),
        }
    }
}

fn matches(actual: &str, expected: &str) -> bool {
    if actual.eq_ignore_ascii_case(expected.trim()) {
        return true;
    }
    matches!((parse_rational(actual), parse_rational(expected)), (Ok(a), Ok(b)) if a == b)
}

fn render(report: &CommandReport, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match &report.table {
                Some(t) => {
                    w.write_record(&t.header)?;
                    for r in &t.rows {
                        w.write_record(r)?;
                    }
                }
                None => {
                    w.write_record(["verdict", "value"])?;
                    for v in &report.verdicts {
                        w.write_record([&v.name, &v.value])?;
                    }
                }
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let mut out = String::new();
            match &report.table {
                Some(t) => {
                    for r in &t.rows {
                        out += &r.join(" ");
                        out.push('\n');
                    }
                }
                None => {
                    for (i, v) in report.verdicts.iter().enumerate() {
                        if i == 0 {
                            out += &v.value;
                        } else {
                            out += &format!("{} {}", v.name, v.value);
                        }
                        out.push('\n');
                    }
                }
            }
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match cli.command.run() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("gpt: error: {e:#}");
            return ExitCode::from(2);
        }
    };
    report.arguments = std::env::args().skip(1).collect();
    report.seed = cli.command.seed();
    report
        .timings
        .insert("total_ms".into(), start.elapsed().as_secs_f64() * 1e3);
    let text = match render(&report, cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("gpt: error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if std::io::stdout().write_all(text.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    let expected = cli
        .expect
        .clone()
        .or_else(|| matches!(cli.command, Command::VerifyCert { .. }).then(|| "true".to_string()));
    match (expected, report.primary()) {
        (Some(e), Some(a)) if !matches(a, &e) => {
            eprintln!("gpt: expected {e}, got {a}");
            ExitCode::from(1)
        }
        (Some(_), None) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
