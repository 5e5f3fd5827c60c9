use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fkpn_cli::{run_file, RunOptions, HARD_ERROR_EXIT};

/// Overdamped Frenkel-Kontorova lattice runs and convergence studies.
#[derive(Debug, Parser)]
#[command(name = "fkpn", version)]
struct Args {
    /// JSON run configuration (schema in docs/config.schema.json).
    #[arg(long)]
    config: PathBuf,
    /// Root directory for run artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for every parallel loop.
    #[arg(long)]
    workers: Option<usize>,
    /// Record in the manifest that the run used no random numbers.
    #[arg(long)]
    seedless: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions {
        out: args.out,
        workers: args.workers,
        seedless: args.seedless,
    };
    match run_file(&args.config, &opts) {
        Ok(outcome) => {
            for a in &outcome.audits {
                let verdict = if a.passed { "ok" } else { "FAILED" };
                eprintln!("{:<32} {:>12.4e} <= {:<12.4e} {verdict}", a.name, a.value, a.tolerance);
            }
            println!("{}", outcome.dir.display());
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(HARD_ERROR_EXIT as u8)
        }
    }
}
