//! `calmkit` command line: solve, diagnose, certify, reproduce, explain, oracle.

use std::process::ExitCode;

use calmkit_cli::{commands, Failure};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "calmkit", version, about = "Calmness certificates and linear-rate diagnostics for proximal methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write its trace CSV and a JSON summary.
    Solve(commands::SolveArgs),
    /// Check a trace against the descent, cost-to-go, error-bound and rate diagnostics.
    Diagnose(commands::DiagnoseArgs),
    /// Evaluate calmness certificates at a point.
    Certify(commands::CertifyArgs),
    /// Rebuild the worked example or a practical scenario.
    Reproduce(commands::ReproduceArgs),
    /// Dump the cones of a penalty's subdifferential graph at a point.
    Explain(commands::ExplainArgs),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(commands::OracleCommand),
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("CALMKIT_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("CALMKIT_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("CALMKIT_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().map_err(Failure::Config).and_then(|_| match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Certify(a) => commands::certify(a),
        Command::Reproduce(a) => commands::reproduce(a),
        Command::Explain(a) => commands::explain(a),
        Command::Oracle(c) => commands::oracle(c),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
