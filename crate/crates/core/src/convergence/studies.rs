use std::time::Instant;

use rayon::prelude::*;

use crate::convergence::report::{fill_ratios, AuditSummary, ConvergenceReport, StudyKind, StudyRow};
use crate::dynamics::{barrier_audit, simulate, stable_timestep, BarrierPair, SimulationOptions, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::harmonic::{discrete_extension_with_stats, TruncationClosure};
use crate::lattice::{nesting_level, restrict, sup_error, LatticeDomain, LatticeField, Window};
use crate::physics::{sample_extension, BoundaryProfile, Scenario};
use crate::scalar::Real;

/// Settings shared by every study.
#[derive(Clone, Debug, PartialEq)]
pub struct StudySpec<T> {
    pub scenario_id: String,
    pub window: Window<T>,
    /// Physical half-width of every truncated lattice.
    pub lateral_extent: T,
    /// Physical height of every truncated lattice.
    pub height_extent: T,
    pub horizon: T,
    pub snapshot_times: Vec<T>,
    pub sim: SimulationOptions<T>,
    /// Relative increase tolerated per pair of rows.
    pub slack: T,
    /// Run the barrier audit on each tested run.
    pub audit_barriers: bool,
}

impl<T: Real> StudySpec<T> {
    pub fn new(
        scenario_id: impl Into<String>,
        window: Window<T>,
        lateral_extent: T,
        height_extent: T,
        horizon: T,
    ) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            window,
            lateral_extent,
            height_extent,
            horizon,
            snapshot_times: Vec::new(),
            sim: SimulationOptions::new(T::zero()),
            slack: T::lit(0.1),
            audit_barriers: false,
        }
    }

    fn domain(&self, n: usize, eps: T) -> Result<LatticeDomain<T>> {
        let d = LatticeDomain::from_extents(n, eps, self.lateral_extent, self.height_extent)?;
        self.window.check_inside(&d)?;
        Ok(d)
    }
}

/// Checks `eps_list` halves at every step.
pub fn check_halving<T: Real>(eps_list: &[T]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(invalid("eps_list", "must not be empty"));
    }
    for w in eps_list.windows(2) {
        if nesting_level(w[1], w[0]) != Some(1) {
            return Err(invalid(
                "eps_list",
                format!("{} -> {} is not a refinement by a factor 2", w[0], w[1]),
            ));
        }
    }
    Ok(())
}

fn audit<T: Real>(scenario: &Scenario<T>, traj: &Trajectory<T>, spec: &StudySpec<T>) -> Result<AuditSummary<T>> {
    let d = traj.domain();
    let f = scenario.nonlinearity(d.eps());
    let b = BarrierPair::from_profile(&scenario.profile, d, &f, traj.beta, &spec.sim.quadrature)?;
    let r = barrier_audit(traj, &b)?;
    let five_dt = T::lit(5.0) * traj.dt;
    Ok(AuditSummary {
        param: d.eps(),
        dt: traj.dt,
        c: r.c,
        c_beta: r.c_beta,
        uniform_violation: r.max_uniform_violation(),
        uniform_tolerance: five_dt * (r.c + r.sup_f),
        beta_violation: r.max_beta_violation(),
        beta_tolerance: r.c_beta.map(|cb| five_dt * cb),
    })
}

/// Max over window snapshot times of the window sup error between two runs
/// on nested lattices (the finer one is restricted).
fn trajectory_error<T: Real>(coarse: &Trajectory<T>, fine: &Trajectory<T>, window: &Window<T>) -> Result<T> {
    let mut worst = T::zero();
    let mut compared = false;
    for (a, b) in coarse.snapshots.iter().zip(&fine.snapshots) {
        if !window.contains_time(a.time()) {
            continue;
        }
        let b = if b.field.domain() == a.field.domain() {
            b.field.clone()
        } else {
            restrict(&b.field, a.field.domain())?
        };
        worst = worst.max(sup_error(&a.field, &b, window)?);
        compared = true;
    }
    if !compared {
        return Err(Error::EmptyWindow);
    }
    Ok(worst)
}

type RunResult<T> = Result<(StudyRow<T>, Option<AuditSummary<T>>)>;

/// Collects per-run results in order, stopping at the first failure.
fn assemble<T: Real>(
    results: Vec<RunResult<T>>,
    kind: StudyKind,
    spec: &StudySpec<T>,
    reference: Option<T>,
) -> ConvergenceReport<T> {
    let mut rows = Vec::new();
    let mut audits = Vec::new();
    let mut aborted = None;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok((row, a)) => {
                rows.push(row);
                audits.extend(a);
            }
            Err(e) => {
                aborted = Some(
                    Error::StudyAborted {
                        completed: k,
                        message: e.to_string(),
                    }
                    .to_string(),
                );
                break;
            }
        }
    }
    fill_ratios(&mut rows);
    ConvergenceReport {
        scenario_id: spec.scenario_id.clone(),
        kind,
        window: spec.window,
        reference,
        rows,
        audits,
        slack: spec.slack,
        aborted,
    }
}

/// Spacing refinement against the `eps_ref` run (self-convergence).
///
/// `eps_ref` may equal the last tested spacing, which then reports zero.
pub fn epsilon_study<T: Real>(
    scenario: &Scenario<T>,
    spec: &StudySpec<T>,
    eps_list: &[T],
    eps_ref: T,
) -> Result<ConvergenceReport<T>> {
    check_halving(eps_list)?;
    let finest = eps_list[eps_list.len() - 1];
    if nesting_level(eps_ref, finest).is_none() {
        return Err(invalid(
            "eps_ref",
            format!("{eps_ref} is not a power-of-two refinement of {finest}"),
        ));
    }
    let n = scenario.profile.n();
    let mut all: Vec<T> = eps_list.to_vec();
    all.push(eps_ref);
    let domains = all.iter().map(|&e| spec.domain(n, e)).collect::<Result<Vec<_>>>()?;
    let mut runs: Vec<Result<Trajectory<T>>> = domains
        .par_iter()
        .map(|d| simulate(scenario, d, spec.horizon, &spec.snapshot_times, &spec.sim))
        .collect();
    let reference = runs.pop().expect("reference run");
    let reference = match reference {
        Ok(r) => r,
        Err(e) => {
            return Ok(assemble(vec![Err(e)], StudyKind::Epsilon, spec, Some(eps_ref)));
        }
    };
    let results = runs
        .into_par_iter()
        .map(|run| {
            let traj = run?;
            let err = trajectory_error(&traj, &reference, &spec.window)?;
            let audit = spec.audit_barriers.then(|| audit(scenario, &traj, spec)).transpose()?;
            Ok((
                StudyRow {
                    param: traj.domain().eps(),
                    sup_error: err,
                    ratio: None,
                    steps: traj.steps,
                    wall_ms: traj.snapshots.last().map_or(0.0, |s| s.wall_ms),
                },
                audit,
            ))
        })
        .collect();
    Ok(assemble(results, StudyKind::Epsilon, spec, Some(eps_ref)))
}

/// `β → 0` at fixed spacing, compared with the `β = 0` run on the boundary
/// plane inside the window. All runs share the smallest stable step.
pub fn beta_study<T: Real>(
    scenario: &Scenario<T>,
    spec: &StudySpec<T>,
    eps: T,
    beta_list: &[T],
) -> Result<ConvergenceReport<T>> {
    if beta_list.is_empty() {
        return Err(invalid("beta_list", "must not be empty"));
    }
    if beta_list.iter().any(|&b| !(b > T::zero())) {
        return Err(invalid("beta_list", "every beta must be positive"));
    }
    if beta_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("beta_list", "must be strictly decreasing"));
    }
    let d = spec.domain(scenario.profile.n(), eps)?;
    let f = scenario.nonlinearity(eps);
    let mut betas = beta_list.to_vec();
    betas.push(T::zero());
    let mut dt = T::infinity();
    for &b in &betas {
        let mut o = spec.sim.dynamics;
        o.beta = b;
        o.dt = None;
        dt = dt.min(o.timestep(&d, &f)?);
    }
    // The shared step must also respect the unscaled threshold of every run.
    dt = dt.min(stable_timestep(&d, beta_list[beta_list.len() - 1], &f, T::one())?);
    let mut runs: Vec<Result<Trajectory<T>>> = betas
        .par_iter()
        .map(|&b| {
            let mut o = spec.sim;
            o.dynamics.beta = b;
            o.dynamics.dt = Some(dt);
            o.dynamics.max_dt = None;
            simulate(scenario, &d, spec.horizon, &spec.snapshot_times, &o)
        })
        .collect();
    let quasi_static = match runs.pop().expect("beta = 0 run") {
        Ok(r) => r,
        Err(e) => return Ok(assemble(vec![Err(e)], StudyKind::Beta, spec, Some(T::zero()))),
    };
    let plane_window = Window {
        height: T::zero(),
        ..spec.window
    };
    let results = runs
        .into_par_iter()
        .map(|run| {
            let traj = run?;
            let err = trajectory_error(&traj, &quasi_static, &plane_window)?;
            Ok((
                StudyRow {
                    param: traj.beta,
                    sup_error: err,
                    ratio: None,
                    steps: traj.steps,
                    wall_ms: traj.snapshots.last().map_or(0.0, |s| s.wall_ms),
                },
                None,
            ))
        })
        .collect();
    Ok(assemble(results, StudyKind::Beta, spec, Some(T::zero())))
}

/// Discrete harmonic extension with kernel faces against `u_0^c` sampled on
/// the window sites.
pub fn extension_study<T: Real>(
    profile: &BoundaryProfile<T>,
    spec: &StudySpec<T>,
    eps_list: &[T],
) -> Result<ConvergenceReport<T>> {
    check_halving(eps_list)?;
    let domains = eps_list
        .iter()
        .map(|&e| spec.domain(profile.n(), e))
        .collect::<Result<Vec<_>>>()?;
    let q = spec.sim.quadrature;
    let solver = spec.sim.dynamics.solver;
    let results = domains
        .par_iter()
        .map(|d| {
            let start = Instant::now();
            let g = crate::lattice::BoundaryField::from_fn(d.clone(), |z| profile.value(z));
            let closure = TruncationClosure::from_kernel(profile, d, &q)?;
            let (discrete, stats) = discrete_extension_with_stats(&g, &closure, &solver)?;
            let sites = spec.window.sites(d);
            let samples = sample_extension(profile, d, &q, &sites)?;
            let mut truth = discrete.values().to_vec();
            for (&o, &v) in sites.iter().zip(&samples) {
                truth[o] = v;
            }
            let truth = LatticeField::from_values(d.clone(), truth, T::zero())?;
            let err = sup_error(&discrete, &truth, &spec.window)?;
            Ok((
                StudyRow {
                    param: d.eps(),
                    sup_error: err,
                    ratio: None,
                    steps: stats.sweeps as u64,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                },
                None,
            ))
        })
        .collect();
    Ok(assemble(results, StudyKind::Extension, spec, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Forcing, Nonlinearity};

    fn spec() -> StudySpec<f64> {
        let mut s = StudySpec::new("unit", Window::new(1.0, 0.5, 0.0, 0.5).unwrap(), 2.0, 1.6, 0.5);
        s.snapshot_times = vec![0.25];
        s
    }

    #[test]
    fn constant_scenario_has_zero_errors() {
        let sc = Scenario::new(
            Forcing::Fixed(Nonlinearity::zero()),
            BoundaryProfile::constant(2, 0.3).unwrap(),
        );
        let r = epsilon_study(&sc, &spec(), &[0.4, 0.2], 0.1).unwrap();
        assert!(r.rows.iter().all(|row| row.sup_error == 0.0));
        assert!(r.is_decreasing() && r.aborted.is_none());
        let r = beta_study(&sc, &spec(), 0.2, &[1.0, 0.1]).unwrap();
        assert!(r.rows.iter().all(|row| row.sup_error == 0.0));
        let r = extension_study(&sc.profile, &spec(), &[0.4, 0.2]).unwrap();
        assert!(r.rows.iter().all(|row| row.sup_error <= 1e-10));
    }

    #[test]
    fn reference_alone_reports_zero() {
        let sc = Scenario::screw(2, 0.02, 0.1, 1.0).unwrap();
        let r = epsilon_study(&sc, &spec(), &[0.2], 0.2).unwrap();
        assert_eq!(r.rows[0].sup_error, 0.0);
    }

    #[test]
    fn rejects_bad_layouts() {
        let sc = Scenario::screw(2, 0.02, 0.1, 1.0).unwrap();
        assert!(epsilon_study(&sc, &spec(), &[0.4, 0.1], 0.05).is_err());
        assert!(epsilon_study(&sc, &spec(), &[0.4, 0.2], 0.15).is_err());
        let mut s = spec();
        s.window.lateral_radius = 2.0;
        assert!(matches!(
            epsilon_study(&sc, &s, &[0.4], 0.2),
            Err(Error::WindowOutsideDomain(_))
        ));
        assert!(beta_study(&sc, &spec(), 0.2, &[0.1, 1.0]).is_err());
    }

    #[test]
    fn shrinking_window_never_increases_errors() {
        let sc = Scenario::screw(2, 0.02, 0.1, 1.0).unwrap();
        let big = epsilon_study(&sc, &spec(), &[0.4, 0.2], 0.1).unwrap();
        let mut s = spec();
        s.window = Window::new(0.5, 0.25, 0.0, 0.25).unwrap();
        let small = epsilon_study(&sc, &s, &[0.4, 0.2], 0.1).unwrap();
        for (a, b) in small.rows.iter().zip(&big.rows) {
            assert!(a.sup_error <= b.sup_error);
        }
    }
}
