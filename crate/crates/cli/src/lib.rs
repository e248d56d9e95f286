//! `sbforms` job runner.
//!
//! A job is a JSON file `{"command", "seed", "params"}`; flags override the
//! seed and the main tolerance. Every run writes `report.json` into the
//! output directory, also when the job fails.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 schema or input
//! error, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub mod commands;
pub mod job;
pub mod plot;
pub mod suites;

pub use job::Command;
use job::JobFile;
pub use suites::Check;

pub const TOOL: &str = "sbforms";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Parser)]
#[command(name = "sbforms", version, about = "Checks for super automorphic forms on the super unit ball")]
pub struct Args {
    pub command: Command,
    /// Job file.
    #[arg(long)]
    pub job: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker cap for the inner parallel loops.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the job's main tolerance (all tolerances for `verify`).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] sbforms_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use sbforms_core::Error as E;
        match self {
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
            CliError::Core(
                E::VanishingDenominator | E::CayleyPole | E::Singular | E::NonFinite(_) | E::QuadratureBudget { .. },
            ) => "numerical",
            CliError::Core(_) => "input",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "numerical" => 3,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

/// What a command hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tolerances: serde_json::Value,
    pub checks: Vec<Check>,
    pub result: serde_json::Value,
    /// Extra files `(name, bytes)` written next to the report.
    pub files: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub job_sha256: String,
    pub seed: u64,
    pub tolerances: serde_json::Value,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: serde_json::Value,
    pub error: Option<ErrorInfo>,
}

/// Runtime options a command sees besides its parameters.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    pub tol: Option<f64>,
    pub plot: bool,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_job(args: &Args, bytes: &[u8]) -> Result<(u64, serde_json::Value), CliError> {
    let job: JobFile = serde_json::from_slice(bytes)?;
    if let Some(c) = job.command {
        if c != args.command {
            return Err(CliError::Schema(format!("job file is a {c} job, invoked as {}", args.command)));
        }
    }
    let params = match job.params {
        serde_json::Value::Null => serde_json::Value::Object(Default::default()),
        p => p,
    };
    Ok((args.seed.or(job.seed).unwrap_or(0), params))
}

fn execute(args: &Args, seed: u64, params: serde_json::Value) -> Result<Outcome, CliError> {
    let ctx = Context {
        seed,
        tol: args.tol,
        plot: args.plot,
    };
    let go = || commands::dispatch(args.command, params, ctx);
    match args.threads {
        Some(0) => Err(CliError::Schema("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn write_outputs(out: &Path, report: &Report, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", out.display()));
    fs::create_dir_all(out).map_err(io)?;
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    fs::write(out.join("report.json"), json).map_err(io)?;
    for (name, bytes) in files {
        fs::write(out.join(name), bytes).map_err(io)?;
    }
    Ok(())
}

/// Runs one job and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let bytes = fs::read(&args.job);
    let job_sha256 = bytes.as_deref().map(sha256_hex).unwrap_or_default();
    let mut seed = args.seed.unwrap_or(0);
    let outcome = bytes
        .map_err(|e| CliError::Io(format!("{}: {e}", args.job.display())))
        .and_then(|b| parse_job(args, &b))
        .and_then(|(s, params)| {
            seed = s;
            execute(args, s, params)
        });
    let (outcome, error) = match outcome {
        Ok(o) => (o, None),
        Err(e) => (Outcome::default(), Some(e)),
    };
    let passed = error.is_none() && outcome.checks.iter().all(|c| c.passed);
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: args.command,
        job_sha256,
        seed,
        tolerances: outcome.tolerances,
        passed,
        checks: outcome.checks,
        result: outcome.result,
        error: error.as_ref().map(|e| ErrorInfo {
            kind: e.kind(),
            message: e.to_string(),
        }),
    };
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {:e} (tol {:e})", c.name, c.value, c.tol);
    }
    if let Err(e) = write_outputs(&args.out, &report, &outcome.files) {
        eprintln!("error: cannot write report: {e}");
        return 2;
    }
    match error {
        Some(e) => {
            eprintln!("error ({}): {e}", e.kind());
            e.exit_code()
        }
        None if passed => 0,
        None => 1,
    }
}
