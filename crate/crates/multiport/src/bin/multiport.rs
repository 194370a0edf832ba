//! Command-line driver: verify networks, simulate gates, solve for angles.
//!
//! Exit codes: 0 on success, 1 when a verification or solve fails its
//! checks, 2 on unreadable or invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use multiport::config::RunConfig;
use multiport::occsim::GateTarget;
use multiport::report::{
    render_json, simulate_csv, simulate_document, solve_continuous_document,
    solve_enumerate_document, verify_document,
};

#[derive(Parser)]
#[command(name = "multiport", version, about = "Staged beam-splitter network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check orthogonality, block conditions and the gate-block residual.
    Verify(VerifyArgs),
    /// Run gate simulations for the configured inputs and semantics.
    Simulate(SimulateArgs),
    /// Find 50:50 sign assignments or continuous angles for a gate target.
    Solve(SolveArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Args)]
struct SolveArgs {
    /// Gate target: "cnot", "swap", or a path to a JSON 4×4 matrix.
    #[arg(long)]
    gate: String,
    /// Search mode.
    #[arg(long, value_parser = ["enumerate", "continuous"])]
    mode: String,
    /// Residual tolerance for the continuous mode.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write the solutions document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => run_verify(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Solve(args) => run_solve(&args),
    };
    match result {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    RunConfig::from_json(&text).map_err(|e| e.to_string())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<bool, String> {
    let config = load_config(&args.config)?;
    let (document, pass) = verify_document(&config).map_err(|e| e.to_string())?;
    emit(&render_json(&document), args.out.as_deref())?;
    Ok(pass)
}

fn run_simulate(args: &SimulateArgs) -> Result<bool, String> {
    let config = load_config(&args.config)?;
    let text = match args.format.as_str() {
        "csv" => simulate_csv(&config).map_err(|e| e.to_string())?,
        _ => render_json(&simulate_document(&config).map_err(|e| e.to_string())?),
    };
    emit(&text, args.out.as_deref())?;
    Ok(true)
}

/// Parse the solve target: a named gate or a JSON file holding either a
/// bare 4×4 array or an object with a "matrix" field.
fn load_target(spec: &str) -> Result<(GateTarget, String), String> {
    match spec {
        "cnot" => Ok((GateTarget::cnot(), "cnot".to_string())),
        "swap" => Ok((GateTarget::swap(), "swap".to_string())),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {path}: {e}"))?;
            let matrix: [[f64; 4]; 4] = serde_json::from_str(&text).or_else(|_| {
                #[derive(serde::Deserialize)]
                struct Wrapper {
                    matrix: [[f64; 4]; 4],
                }
                serde_json::from_str::<Wrapper>(&text)
                    .map(|w| w.matrix)
                    .map_err(|e| format!("cannot parse gate matrix from {path}: {e}"))
            })?;
            let target = GateTarget::custom(nalgebra::Matrix4::from_fn(|i, j| matrix[i][j]))
                .map_err(|e| e.to_string())?;
            Ok((target, "custom".to_string()))
        }
    }
}

fn run_solve(args: &SolveArgs) -> Result<bool, String> {
    let (target, gate_name) = load_target(&args.gate)?;
    let (document, pass) = match args.mode.as_str() {
        "enumerate" => solve_enumerate_document(&target, &gate_name),
        _ => solve_continuous_document(&target, &gate_name, args.tol)
            .map_err(|e| e.to_string())?,
    };
    emit(&render_json(&document), args.out.as_deref())?;
    Ok(pass)
}
