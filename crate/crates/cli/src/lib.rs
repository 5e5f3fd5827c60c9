//! Configuration, orchestration and artifact output for the `fkpn` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

pub mod artifacts;
pub mod commands;
pub mod config;

pub use commands::{Audit, CommandOutput};
pub use config::{parse_config, Command, ConfigErrors, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: fkpn_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Outcome of a completed run, mapped onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    AuditFailure,
    /// Artifacts were written but a study stopped early.
    Aborted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Ok => 0,
            Self::AuditFailure => 1,
            Self::Aborted => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::AuditFailure => "audit-failure",
            Self::Aborted => "aborted",
        }
    }
}

/// Exit code for errors that prevented any artifact from being written.
pub const HARD_ERROR_EXIT: i32 = 2;

/// Settings that affect how a run executes but not what it computes.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Output root; falls back to the config's `output`, then `runs`.
    pub out: Option<PathBuf>,
    /// Worker threads; falls back to the config's `workers`, then 1.
    pub workers: Option<usize>,
    pub seedless: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub status: Status,
    pub audits: Vec<Audit>,
}

/// Runs a validated configuration and writes its artifact directory.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let workers = opts.workers.or(cfg.workers).unwrap_or(1);
    if workers == 0 {
        return Err(RunError::Pool("need at least one worker".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let start = Instant::now();
    let output = pool.install(|| commands::execute(cfg))?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let status = if output.aborted.is_some() {
        Status::Aborted
    } else if output.audits.iter().any(|a| a.acceptance && !a.passed) {
        Status::AuditFailure
    } else {
        Status::Ok
    };
    let config: serde_json::Value = serde_json::from_str(&cfg.canonical()).expect("canonical JSON");
    let manifest = json!({
        "run": cfg.run_name(),
        "hash": cfg.hash(),
        "command": cfg.command.name(),
        "config": config,
        "versions": {
            "fkpn-cli": env!("CARGO_PKG_VERSION"),
            "fkpn-core": fkpn_core::VERSION,
        },
        "wall_ms": wall_ms,
        "seedless": opts.seedless,
        "workers": workers,
        "dt": output.dt,
        "steps": output.steps,
        "files": output.files.iter().map(|(p, _)| p.as_str()).collect::<Vec<_>>(),
        "audits": output.audits,
        "summary": output.summary,
        "aborted": output.aborted,
        "status": status.label(),
    });
    let manifest = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let root = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let dir = artifacts::write_run(&root, &cfg.run_name(), &output.files, &manifest)?;
    Ok(RunOutcome {
        dir,
        status,
        audits: output.audits,
    })
}

/// Reads, validates and runs a configuration file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    run(&parse_config(&text)?, opts)
}
