use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the lattice laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lattice would hold {sites} sites, above the budget of {budget}")]
    SiteBudgetExceeded { sites: u128, budget: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("lattices are not nested: fine eps {fine}, coarse eps {coarse} ({reason})")]
    NotNested { fine: f64, coarse: f64, reason: String },

    #[error("fields live on different lattices")]
    DomainMismatch,

    #[error("window has an empty intersection with the comparison set")]
    EmptyWindow,

    #[error("window is not strictly inside the truncated domain: {0}")]
    WindowOutsideDomain(String),

    #[error("{0} is only implemented for dimensions 1 to 3 (got n = {1})")]
    UnsupportedDimension(&'static str, usize),

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e} at x = {point:?}")]
    QuadratureTolerance {
        point: Vec<f64>,
        estimate: f64,
        tolerance: f64,
    },

    #[error("elliptic solve did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("non-finite value after step {step}")]
    NonFinite { step: u64 },

    #[error("ordering precondition violated: first trajectory exceeds second by {excess:e} at t = 0")]
    OrderingPrecondition { excess: f64 },

    #[error("study aborted after {completed} completed runs: {message}")]
    StudyAborted { completed: usize, message: String },

    #[error("malformed field file {path}: {reason}")]
    MalformedField { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
