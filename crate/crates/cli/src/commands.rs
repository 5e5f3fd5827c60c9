//! One function per subcommand. Each returns the files to write and the
//! audit lines for the manifest; nothing here touches the filesystem.

use std::fmt::Write as _;

use fkpn_core::convergence::{beta_study, epsilon_study, extension_study, ConvergenceReport, StudySpec};
use fkpn_core::dynamics::{barrier_audit, ordering_audit, simulate, BarrierPair, SimulationOptions, Trajectory};
use fkpn_core::harmonic::{decay_report, DecaySampling, KernelQuadrature, SolverOptions};
use fkpn_core::lattice::io::{field_to_csv, fmt_sig17};
use fkpn_core::lattice::LatticeDomain;
use fkpn_core::physics::Scenario;
use serde::Serialize;

use crate::config::{Command, ProfileConfig, RunConfig};
use crate::RunError;

/// Largest tolerated excess of the lower run over the upper run.
pub const ORDERING_TOLERANCE: f64 = 1e-12;

/// One audited quantity. `acceptance` audits decide the exit status.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Audit {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub acceptance: bool,
}

impl Audit {
    fn bound(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
            acceptance: true,
        }
    }
}

/// Everything a command produced, before it is written out.
#[derive(Clone, Debug, Default)]
pub struct CommandOutput {
    /// Relative path and contents, in write order.
    pub files: Vec<(String, String)>,
    pub audits: Vec<Audit>,
    pub dt: Option<f64>,
    pub steps: Option<u64>,
    /// Set when a study stopped early; the completed rows are still written.
    pub aborted: Option<String>,
    pub summary: serde_json::Map<String, serde_json::Value>,
}

pub fn execute(cfg: &RunConfig) -> Result<CommandOutput, RunError> {
    match cfg.command {
        Command::Simulate => run_simulate(cfg),
        Command::Extend => run_extend(cfg),
        Command::Converge | Command::BetaStudy | Command::ExtensionStudy => run_study(cfg),
        Command::Barriers => run_barriers(cfg),
    }
}

fn core<T>(context: &str, r: fkpn_core::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Core {
        context: context.to_string(),
        source,
    })
}

pub fn simulation_options(cfg: &RunConfig, beta: f64) -> SimulationOptions<f64> {
    let mut opts = SimulationOptions::new(beta);
    opts.dynamics.safety = cfg.safety;
    opts.dynamics.max_dt = cfg.max_dt;
    opts.dynamics.solver = SolverOptions::with_tol(cfg.elliptic_tol);
    opts.closure = cfg.closure.kind();
    opts.quadrature = KernelQuadrature::with_tolerance(cfg.quadrature_tol);
    opts
}

fn domain(cfg: &RunConfig, eps: f64) -> Result<LatticeDomain<f64>, RunError> {
    core(
        "domain",
        LatticeDomain::from_extents(cfg.n, eps, cfg.domain.lateral_extent, cfg.domain.height_extent),
    )
}

fn scenario(cfg: &RunConfig) -> Result<Scenario<f64>, RunError> {
    core("scenario", cfg.scenario())
}

fn scenario_id(cfg: &RunConfig) -> String {
    let kind = match cfg.profile {
        ProfileConfig::Screw { .. } => "screw",
        ProfileConfig::Edge { .. } => "edge",
        ProfileConfig::Constant { .. } => "constant",
        ProfileConfig::Arctan { .. } => "arctan",
    };
    format!("{kind}-n{}", cfg.n)
}

fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut s = String::from("time,steps,boundary_min,boundary_max,sup_norm\n");
    for snap in &traj.snapshots {
        let plane = &snap.field.values()[..traj.domain().plane_len()];
        let lo = plane.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = plane.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sup = snap.field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_sig17(snap.time()),
            snap.steps,
            fmt_sig17(lo),
            fmt_sig17(hi),
            fmt_sig17(sup)
        );
    }
    s
}

/// Barrier CSV plus the audit lines for one trajectory.
fn audit_barriers(
    cfg: &RunConfig,
    sc: &Scenario<f64>,
    traj: &Trajectory<f64>,
    out: &mut CommandOutput,
) -> Result<(), RunError> {
    let d = traj.domain();
    let f = sc.nonlinearity(d.eps());
    let q = KernelQuadrature::with_tolerance(cfg.quadrature_tol);
    let pair = core("barriers", BarrierPair::from_profile(&sc.profile, d, &f, traj.beta, &q))?;
    let report = core("barrier audit", barrier_audit(traj, &pair))?;
    let mut s = String::from("time,upper,lower,flat,beta_cone\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_sig17(r.time),
            fmt_sig17(r.upper),
            fmt_sig17(r.lower),
            fmt_sig17(r.flat),
            r.beta_cone.map(fmt_sig17).unwrap_or_default()
        );
    }
    out.files.push(("barriers.csv".into(), s));
    let five_dt = 5.0 * traj.dt;
    out.audits.push(Audit::bound(
        "uniform_barriers",
        report.max_uniform_violation(),
        five_dt * (report.c + report.sup_f),
    ));
    if let (Some(v), Some(cb)) = (report.max_beta_violation(), report.c_beta) {
        out.audits.push(Audit::bound("beta_cone", v, five_dt * cb));
    }
    out.summary.insert("barrier_c".into(), report.c.into());
    if let Some(cb) = report.c_beta {
        out.summary.insert("barrier_c_beta".into(), cb.into());
    }
    Ok(())
}

fn run_simulate(cfg: &RunConfig) -> Result<CommandOutput, RunError> {
    let eps = cfg.eps.expect("validated");
    let d = domain(cfg, eps)?;
    let sc = scenario(cfg)?;
    let opts = simulation_options(cfg, cfg.beta);
    let traj = core("simulate", simulate(&sc, &d, cfg.horizon, &cfg.snapshot_times, &opts))?;
    let mut out = CommandOutput {
        dt: Some(traj.dt),
        steps: Some(traj.steps),
        ..Default::default()
    };
    for (i, snap) in traj.snapshots.iter().enumerate() {
        out.files.push((
            format!("snapshots/snapshot_{i:04}.csv"),
            field_to_csv(snap.field.domain(), snap.field.values(), snap.time()),
        ));
    }
    out.files.push(("trajectory.csv".into(), trajectory_csv(&traj)));
    out.summary.insert("max_sweeps".into(), traj.max_sweeps.into());
    if cfg.audit_barriers {
        audit_barriers(cfg, &sc, &traj, &mut out)?;
    }
    Ok(out)
}

fn run_extend(cfg: &RunConfig) -> Result<CommandOutput, RunError> {
    let eps = cfg.eps.expect("validated");
    let sc = scenario(cfg)?;
    let width = match cfg.profile {
        ProfileConfig::Screw { width } | ProfileConfig::Edge { width } | ProfileConfig::Arctan { width, .. } => width,
        ProfileConfig::Constant { .. } => 1.0,
    };
    let q = KernelQuadrature::with_tolerance(cfg.quadrature_tol);
    let report = core(
        "extend",
        decay_report(&sc.profile, &cfg.heights, &q, &DecaySampling::around(width, eps)),
    )?;
    let mut out = CommandOutput::default();
    out.files.push(("decay.csv".into(), report.to_csv()));
    out.summary.insert("decay_constant".into(), report.constant.into());
    out.summary
        .insert("lattice_decay_constant".into(), report.lattice_constant.into());
    out.summary.insert(
        "growing_columns".into(),
        report.growth.iter().map(|&s| serde_json::Value::from(s)).collect(),
    );
    out.audits.push(Audit {
        name: "decay_products_bounded".into(),
        value: report.growth.len() as f64,
        tolerance: 0.0,
        passed: report.growth.is_empty(),
        acceptance: false,
    });
    Ok(out)
}

fn study_spec(cfg: &RunConfig) -> StudySpec<f64> {
    let window = cfg.window().expect("validated");
    let mut spec = StudySpec::new(
        scenario_id(cfg),
        window,
        cfg.domain.lateral_extent,
        cfg.domain.height_extent,
        cfg.horizon,
    );
    spec.snapshot_times = cfg.snapshot_times.clone();
    spec.sim = simulation_options(cfg, cfg.beta);
    spec.slack = cfg.slack;
    spec.audit_barriers = cfg.audit_barriers && cfg.command != Command::ExtensionStudy;
    spec
}

fn run_study(cfg: &RunConfig) -> Result<CommandOutput, RunError> {
    let spec = study_spec(cfg);
    let sc = scenario(cfg)?;
    let report = match cfg.command {
        Command::Converge => epsilon_study(
            &sc,
            &spec,
            cfg.eps_list.as_deref().expect("validated"),
            cfg.eps_ref.expect("validated"),
        ),
        Command::BetaStudy => beta_study(
            &sc,
            &spec,
            cfg.eps.expect("validated"),
            cfg.beta_list.as_deref().expect("validated"),
        ),
        _ => extension_study(&sc.profile, &spec, cfg.eps_list.as_deref().expect("validated")),
    };
    let report = core("study", report)?;
    Ok(study_output(&report))
}

fn study_output(report: &ConvergenceReport<f64>) -> CommandOutput {
    let mut out = CommandOutput {
        aborted: report.aborted.clone(),
        ..Default::default()
    };
    out.files.push(("report.csv".into(), report.to_csv()));
    out.files.push(("report.dat".into(), report.to_dat()));
    out.files.push(("timings.csv".into(), report.timings_csv()));
    out.steps = Some(report.rows.iter().map(|r| r.steps).sum());
    let flagged = report.flagged_pairs();
    out.audits.push(Audit {
        name: "errors_decreasing".into(),
        value: flagged.len() as f64,
        tolerance: 0.0,
        passed: flagged.is_empty(),
        acceptance: true,
    });
    if !report.audits.is_empty() {
        let mut s =
            String::from("param,dt,c,c_beta,uniform_violation,uniform_tolerance,beta_violation,beta_tolerance\n");
        let opt = |v: Option<f64>| v.map(fmt_sig17).unwrap_or_default();
        for a in &report.audits {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                fmt_sig17(a.param),
                fmt_sig17(a.dt),
                fmt_sig17(a.c),
                opt(a.c_beta),
                fmt_sig17(a.uniform_violation),
                fmt_sig17(a.uniform_tolerance),
                opt(a.beta_violation),
                opt(a.beta_tolerance)
            );
            let tag = format!("{}={}", report.kind.parameter(), a.param);
            out.audits.push(Audit::bound(
                format!("uniform_barriers[{tag}]"),
                a.uniform_violation,
                a.uniform_tolerance,
            ));
            if let (Some(v), Some(tol)) = (a.beta_violation, a.beta_tolerance) {
                out.audits.push(Audit::bound(format!("beta_cone[{tag}]"), v, tol));
            }
        }
        out.files.push(("audits.csv".into(), s));
    }
    out.summary.insert("max_error".into(), report.max_error().into());
    out.summary.insert(
        "flagged_pairs".into(),
        flagged.iter().map(|&(a, b)| serde_json::json!([a, b])).collect(),
    );
    out
}

fn run_barriers(cfg: &RunConfig) -> Result<CommandOutput, RunError> {
    let eps = cfg.eps.expect("validated");
    let d = domain(cfg, eps)?;
    let sc = scenario(cfg)?;
    let shifted = sc.with_profile(sc.profile.shifted(cfg.ordering_shift));
    let opts = simulation_options(cfg, cfg.beta);
    let (lower, upper) = rayon::join(
        || simulate(&sc, &d, cfg.horizon, &cfg.snapshot_times, &opts),
        || simulate(&shifted, &d, cfg.horizon, &cfg.snapshot_times, &opts),
    );
    let lower = core("simulate", lower)?;
    let upper = core("simulate shifted data", upper)?;
    let mut out = CommandOutput {
        dt: Some(lower.dt),
        steps: Some(lower.steps),
        ..Default::default()
    };
    out.files.push(("trajectory.csv".into(), trajectory_csv(&lower)));
    audit_barriers(cfg, &sc, &lower, &mut out)?;
    let excess = core("ordering audit", ordering_audit(&lower, &upper))?;
    out.files.push((
        "ordering.csv".into(),
        format!(
            "shift,max_excess\n{},{}\n",
            fmt_sig17(cfg.ordering_shift),
            fmt_sig17(excess)
        ),
    ));
    out.audits.push(Audit::bound("ordering", excess, ORDERING_TOLERANCE));
    Ok(out)
}
