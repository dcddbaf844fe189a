//! `bergman`: experiments on Bergman shift matrices from the command line.

mod error;
mod ops;
mod params;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use error::{config, CliError};
use ops::{Ctx, Output, DEFAULT_EPSILON, DEFAULT_POINTS};
use params::Params;

#[derive(Parser)]
#[command(name = "bergman", version, about = "Bergman shift matrix experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export an N×N truncation as CSV (i, j, re, im).
    BuildMatrix(Params),
    /// Ratios P_{n-1}/P_n (or p_{n-1}/p_n with --normalized) at a point or on a circle.
    Ratio(Params),
    /// Laurent coefficients of the ratio at infinity.
    Laurent(Params),
    /// Weak and Cesàro moments.
    Moments(Params),
    /// Zeros of P_n.
    Zeros(Params),
    /// Right-limit estimate along a subsequence, or paired differences of two models.
    RightLimit(Params),
    /// Relative asymptotics of two models, or a built-in example.
    Compare(Params),
    /// Best-match distance between a random model and a target (--seed required).
    Random(Params),
    /// Emit a universal coefficient sequence.
    Universal(Params),
    /// Run the operation named in a config file.
    Run(Params),
}

const OPERATIONS: [&str; 9] = [
    "build-matrix",
    "ratio",
    "laurent",
    "moments",
    "zeros",
    "right-limit",
    "compare",
    "random",
    "universal",
];

fn dispatch(op: &str, ctx: &mut Ctx) -> Result<Output, CliError> {
    match op {
        "build-matrix" => ops::build_matrix(ctx),
        "ratio" => ops::ratio_cmd(ctx),
        "laurent" => ops::laurent(ctx),
        "moments" => ops::moments(ctx),
        "zeros" => ops::zeros_cmd(ctx),
        "right-limit" => ops::right_limit(ctx),
        "compare" => ops::compare(ctx),
        "random" => ops::random(ctx),
        "universal" => ops::universal(ctx),
        other => Err(config(format!(
            "unknown operation `{other}`; expected one of {}",
            OPERATIONS.join(", ")
        ))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn execute(op: Option<&str>, params: Params) -> Result<(), CliError> {
    let params = params.resolve()?;
    let op = match (op, params.operation.as_deref()) {
        (Some(cmd), Some(file)) if cmd != file => {
            return Err(config(format!(
                "config names operation `{file}` but `{cmd}` was invoked"
            )))
        }
        (Some(cmd), _) => cmd.to_string(),
        (None, Some(file)) => file.to_string(),
        (None, None) => return Err(config("the config file has no `operation`")),
    };
    let mut ctx = Ctx::new(params.clone());
    let output = dispatch(&op, &mut ctx)?;

    let mut hashed = params.clone();
    hashed.operation = Some(op.clone());
    hashed.out = None;
    hashed.manifest = None;
    let canonical = serde_json::to_string(&hashed).map_err(|e| CliError::Io(e.to_string()))?;
    let digest = hex::encode(Sha256::digest(canonical.as_bytes()));

    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match &params.out {
        Some(path) => write_file(path, &output.csv)?,
        None if output.text.is_none() => lock.write_all(&output.csv)?,
        None => {}
    }
    if let Some(text) = &output.text {
        lock.write_all(text.as_bytes())?;
    }
    if let Some(path) = params.manifest_path() {
        let manifest = json!({
            "tool": "bergman",
            "versions": {
                "bergman-cli": env!("CARGO_PKG_VERSION"),
                "bergman-shift": bergman_shift::VERSION,
            },
            "operation": op,
            "config_sha256": digest,
            "config": serde_json::from_str::<Value>(&canonical).unwrap_or(Value::Null),
            "defaults": {
                "points": DEFAULT_POINTS,
                "epsilon": DEFAULT_EPSILON,
                "radius": "2*R_est",
                "applied": ctx.defaults,
            },
            "resolved": ctx.resolved,
            "outputs": {
                "csv": params.out.as_ref().map(|p| p.display().to_string()),
            },
            "summary": output.summary,
        });
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        write_file(&path, text.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (op, params) = match cli.command {
        Command::BuildMatrix(p) => (Some("build-matrix"), p),
        Command::Ratio(p) => (Some("ratio"), p),
        Command::Laurent(p) => (Some("laurent"), p),
        Command::Moments(p) => (Some("moments"), p),
        Command::Zeros(p) => (Some("zeros"), p),
        Command::RightLimit(p) => (Some("right-limit"), p),
        Command::Compare(p) => (Some("compare"), p),
        Command::Random(p) => (Some("random"), p),
        Command::Universal(p) => (Some("universal"), p),
        Command::Run(p) => {
            if p.config.is_none() {
                eprintln!("error: config error: `run` requires --config");
                return ExitCode::from(2);
            }
            (None, p)
        }
    };
    match execute(op, params) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
