use std::fmt::Write as _;

use crate::lattice::io::fmt_sig17;
use crate::lattice::Window;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    /// Lattice spacing refinement against a finer reference run.
    Epsilon,
    /// `β → 0` against the `β = 0` run on the same lattice.
    Beta,
    /// Discrete against continuous harmonic extension.
    Extension,
}

impl StudyKind {
    pub fn parameter(self) -> &'static str {
        match self {
            Self::Epsilon | Self::Extension => "eps",
            Self::Beta => "beta",
        }
    }

    /// What the error column is measured against.
    pub fn reference_label(self) -> &'static str {
        match self {
            Self::Epsilon => "vs reference run at eps_ref",
            Self::Beta => "vs reference run at beta = 0",
            Self::Extension => "vs kernel quadrature of the continuous extension",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyRow<T> {
    /// `ε` or `β` of the run.
    pub param: T,
    pub sup_error: T,
    /// Previous error over this one; absent on the first row or when the
    /// error vanishes.
    pub ratio: Option<T>,
    /// Time steps (or solver sweeps for extension studies).
    pub steps: u64,
    pub wall_ms: f64,
}

/// Barrier audit of one run with the tolerance it is judged against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditSummary<T> {
    pub param: T,
    pub dt: T,
    pub c: T,
    pub c_beta: Option<T>,
    pub uniform_violation: T,
    pub uniform_tolerance: T,
    pub beta_violation: Option<T>,
    pub beta_tolerance: Option<T>,
}

impl<T: Real> AuditSummary<T> {
    pub fn passed(&self) -> bool {
        self.uniform_violation <= self.uniform_tolerance
            && match (self.beta_violation, self.beta_tolerance) {
                (Some(v), Some(tol)) => v <= tol,
                _ => true,
            }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<T> {
    pub scenario_id: String,
    pub kind: StudyKind,
    pub window: Window<T>,
    /// `ε_ref` for spacing studies.
    pub reference: Option<T>,
    pub rows: Vec<StudyRow<T>>,
    pub audits: Vec<AuditSummary<T>>,
    /// Allowed relative increase per pair before it is flagged.
    pub slack: T,
    /// Set when a run failed; `rows` then holds the completed prefix.
    pub aborted: Option<String>,
}

pub const REPORT_CSV_COLUMNS: [&str; 3] = ["sup_error", "ratio", "steps"];

impl<T: Real> ConvergenceReport<T> {
    /// Pairs `(k, k + 1)` whose error does not decrease within the slack.
    pub fn flagged_pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .windows(2)
            .enumerate()
            .filter(|(_, w)| !decreases(w[0].sup_error, w[1].sup_error, self.slack))
            .map(|(k, _)| (k, k + 1))
            .collect()
    }

    pub fn is_decreasing(&self) -> bool {
        self.flagged_pairs().is_empty()
    }

    pub fn audits_passed(&self) -> bool {
        self.audits.iter().all(AuditSummary::passed)
    }

    pub fn max_error(&self) -> T {
        self.rows.iter().fold(T::zero(), |m, r| m.max(r.sup_error))
    }

    /// Report table; deterministic bytes for a given configuration.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},{}\n", self.kind.parameter(), REPORT_CSV_COLUMNS.join(","));
        for r in &self.rows {
            let ratio = r.ratio.map(|x| fmt_sig17(x.as_f64())).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt_sig17(r.param.as_f64()),
                fmt_sig17(r.sup_error.as_f64()),
                ratio,
                r.steps
            );
        }
        s
    }

    /// Wall-clock times, kept apart from the report so reruns compare bytewise.
    pub fn timings_csv(&self) -> String {
        let mut s = format!("{},wall_ms\n", self.kind.parameter());
        for r in &self.rows {
            let _ = writeln!(s, "{},{:.3}", fmt_sig17(r.param.as_f64()), r.wall_ms);
        }
        s
    }

    /// Whitespace-separated columns for log-log plots.
    pub fn to_dat(&self) -> String {
        let mut s = format!(
            "# {} study, scenario {}\n# sup_error {}\n# {} sup_error\n",
            match self.kind {
                StudyKind::Epsilon => "spacing",
                StudyKind::Beta => "beta",
                StudyKind::Extension => "extension",
            },
            self.scenario_id,
            self.kind.reference_label(),
            self.kind.parameter()
        );
        for r in &self.rows {
            let _ = writeln!(s, "{} {}", fmt_sig17(r.param.as_f64()), fmt_sig17(r.sup_error.as_f64()));
        }
        s
    }
}

/// `next < (1 + slack) prev`, with two vanishing errors counting as a pass.
pub fn decreases<T: Real>(prev: T, next: T, slack: T) -> bool {
    next < (T::one() + slack) * prev || (prev == T::zero() && next == T::zero())
}

pub(crate) fn fill_ratios<T: Real>(rows: &mut [StudyRow<T>]) {
    for k in 1..rows.len() {
        let (prev, cur) = (rows[k - 1].sup_error, rows[k].sup_error);
        rows[k].ratio = (cur > T::zero()).then(|| prev / cur);
    }
}
