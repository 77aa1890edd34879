//! Batch front end for `projconf`: reads a scene file, runs one analysis and
//! writes a deterministic JSON report (or CSV for geodesics).
//!
//! Exit codes: 0 when the command's property holds, 2 when it fails, 1 on
//! any error.

pub mod commands;
pub mod error;
pub mod report;
pub mod scene;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use projconf::Signature;
use sha2::{Digest, Sha256};

pub use error::CliError;
pub use report::{Report, Verdict};
pub use scene::{load_scene, parse_scene, LoadOptions, Scene};

use commands::{GeodesicRequest, RunOptions, Timer};

#[derive(Parser, Debug)]
#[command(name = "projconf", version, about = "Exact projective, conformal and Weyl-structure invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scene file to analyze.
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the scene's signature tag: +1 or -1.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_signature)]
    pub signature: Option<Signature>,
    /// Number of random samples (para-CR diagnostics, identity corpus).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for every randomized part of a run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest total degree any intermediate expression may reach.
    #[arg(long, global = true)]
    pub degree_bound: Option<u32>,
    /// Add wall times to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Curvature and conformal invariants of `[metric]` (and `[beta]`).
    AnalyzeMetric,
    /// Curvature and projective invariants of `[connection]`.
    AnalyzeConnection,
    /// The ODE pair of `[odes]` or of the connection, and its projectivity test.
    Odes,
    /// Thomas symbols of the connection or of `[odes]`.
    Thomas,
    /// Whether `[connection]` and `[connection2]` are projectively equivalent.
    Equivalent,
    /// Whether `[connection]` is projectively a Weyl connection for `[metric]`.
    Metrizable,
    /// Projective against conformal flatness of the Weyl structure.
    Beltrami,
    /// Whether the Weyl structure is Einstein–Weyl.
    EinsteinWeyl,
    /// Root type of a real binary quartic.
    Quartic {
        /// Coefficients C4,C3,C2,C1,C0 as rationals.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
    },
    /// Twistor quartic type of a conformal 3-metric.
    TwistorType,
    /// Para-CR frame and bracket diagnostics of a projective 3-structure.
    Paracr,
    /// The identity suite on the scene's Weyl structure, plus an optional random corpus.
    Identities,
    /// Integrate one geodesic and print it as CSV.
    Geodesic {
        /// Start point (defaults to the origin).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        /// Initial velocity.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        v0: Vec<f64>,
        /// RK4 step size.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeMetric => "analyze-metric",
            Command::AnalyzeConnection => "analyze-connection",
            Command::Odes => "odes",
            Command::Thomas => "thomas",
            Command::Equivalent => "equivalent",
            Command::Metrizable => "metrizable",
            Command::Beltrami => "beltrami",
            Command::EinsteinWeyl => "einstein-weyl",
            Command::Quartic { .. } => "quartic",
            Command::TwistorType => "twistor-type",
            Command::Paracr => "paracr",
            Command::Identities => "identities",
            Command::Geodesic { .. } => "geodesic",
        }
    }
}

fn parse_signature(s: &str) -> Result<Signature, String> {
    s.trim().parse::<i64>().ok().and_then(Signature::from_epsilon).ok_or_else(|| "expected +1 or -1".to_string())
}

/// Text to emit and the exit code it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let options = RunOptions { samples: cli.samples, seed: cli.seed };
    let mut timer = Timer::default();
    let name = cli.command.name();

    if let Command::Quartic { coeffs } = &cli.command {
        let q = commands::parse_coeffs(coeffs)?;
        let canonical: Vec<String> = q.0.iter().rev().map(|c| c.to_string()).collect();
        let digest = Sha256::digest(canonical.join(",").as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        let (records, verdict) = timer.time(name, || commands::quartic(&q));
        return Ok(finish(name, digest, records, verdict, cli.timings.then_some(timer)));
    }

    let path = cli.scene.as_ref().ok_or_else(|| CliError::Usage(format!("`{name}` needs --scene <path>")))?;
    let load = LoadOptions { signature: cli.signature, degree_bound: cli.degree_bound };
    let scene = timer.time("load", || load_scene(path, &load))?;

    let result = match &cli.command {
        Command::Geodesic { x0, v0, h, steps } => {
            let req = GeodesicRequest { x0, v0, h: *h, steps: *steps };
            let csv = commands::geodesic(&scene, &req)?;
            return Ok(Outcome { text: csv, exit_code: 0 });
        }
        Command::AnalyzeMetric => timer.time(name, || commands::analyze_metric(&scene)),
        Command::AnalyzeConnection => timer.time(name, || commands::analyze_connection(&scene)),
        Command::Odes => timer.time(name, || commands::odes(&scene)),
        Command::Thomas => timer.time(name, || commands::thomas_symbols(&scene)),
        Command::Equivalent => timer.time(name, || commands::equivalent(&scene)),
        Command::Metrizable => timer.time(name, || commands::metrizable(&scene)),
        Command::Beltrami => timer.time(name, || commands::beltrami(&scene)),
        Command::EinsteinWeyl => timer.time(name, || commands::einstein_weyl_check(&scene)),
        Command::TwistorType => timer.time(name, || commands::twistor_type(&scene)),
        Command::Paracr => timer.time(name, || commands::paracr(&scene, &options)),
        Command::Identities => {
            let start = std::time::Instant::now();
            let out = commands::identities(&scene, &options, &mut timer);
            timer.entries.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
            out
        }
        Command::Quartic { .. } => unreachable!("handled above"),
    };
    let (records, verdict) = result?;
    Ok(finish(name, scene.digest.clone(), records, verdict, cli.timings.then_some(timer)))
}

fn finish(
    command: &str,
    input_digest: String,
    records: commands::Records,
    verdict: Verdict,
    timer: Option<Timer>,
) -> Outcome {
    let report =
        Report { command: command.to_string(), input_digest, records, verdict, timings: timer.map(|t| t.entries) };
    Outcome { text: report.to_json(), exit_code: verdict.exit_code() }
}

/// Parses arguments, runs, writes the output and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    match written {
        Ok(()) => outcome.exit_code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
