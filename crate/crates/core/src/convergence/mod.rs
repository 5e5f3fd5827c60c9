//! Convergence experiments: spacing refinement, `β → 0`, discrete against
//! continuous harmonic extension, and one-step equation residuals.
//!
//! Every error column is measured against a surrogate (a finer run, the
//! `β = 0` run, or a quadrature), never against an exact solution.

mod report;
mod residual;
mod studies;

pub use report::{decreases, AuditSummary, ConvergenceReport, StudyKind, StudyRow, REPORT_CSV_COLUMNS};
pub use residual::{residual_report, ResidualReport};
pub use studies::{beta_study, check_halving, epsilon_study, extension_study, StudySpec};
