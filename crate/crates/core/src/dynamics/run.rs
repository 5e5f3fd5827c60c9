use std::time::Instant;

use crate::dynamics::{DynamicsOptions, SimState};
use crate::error::{invalid, Result};
use crate::harmonic::{KernelQuadrature, TruncationClosure};
use crate::lattice::{LatticeDomain, LatticeField};
use crate::physics::{extend_initial_data, InitialData, Scenario};
use crate::scalar::Real;

/// Truncation-face behaviour of a run built from a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClosureKind {
    /// Faces frozen at the Poisson extension `u_0^c`.
    #[default]
    Kernel,
    ZeroNormalDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationOptions<T> {
    pub dynamics: DynamicsOptions<T>,
    pub closure: ClosureKind,
    pub quadrature: KernelQuadrature<T>,
}

impl<T: Real> SimulationOptions<T> {
    pub fn new(beta: T) -> Self {
        Self {
            dynamics: DynamicsOptions::new(beta),
            closure: ClosureKind::Kernel,
            quadrature: KernelQuadrature::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    pub steps: u64,
    /// Wall-clock time since the run started; never part of report bytes.
    pub wall_ms: f64,
    pub field: LatticeField<T>,
}

impl<T: Real> Snapshot<T> {
    pub fn time(&self) -> T {
        self.field.time()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub beta: T,
    pub dt: T,
    pub steps: u64,
    /// Largest sweep count of any bulk solve (`β = 0`).
    pub max_sweeps: usize,
    pub snapshots: Vec<Snapshot<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn domain(&self) -> &LatticeDomain<T> {
        self.snapshots[0].field.domain()
    }

    pub fn initial(&self) -> &LatticeField<T> {
        &self.snapshots[0].field
    }

    pub fn last(&self) -> &LatticeField<T> {
        &self.snapshots[self.snapshots.len() - 1].field
    }

    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.time()).collect()
    }
}

/// Sorted snapshot schedule: `0`, the requested times and the horizon.
pub fn snapshot_schedule<T: Real>(horizon: T, times: &[T]) -> Result<Vec<T>> {
    if !(horizon >= T::zero()) || !horizon.is_finite() {
        return Err(invalid(
            "horizon",
            format!("must be finite and nonnegative, got {horizon}"),
        ));
    }
    let mut all = vec![T::zero(), horizon];
    for &t in times {
        if !(t >= T::zero() && t <= horizon) {
            return Err(invalid("snapshot_times", format!("time {t} outside [0, {horizon}]")));
        }
        all.push(t);
    }
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    all.dedup();
    Ok(all)
}

/// Runs `state` to `horizon`, recording the state at each scheduled time.
/// Steps are shortened where needed to hit the schedule exactly.
pub fn simulate_from<T: Real>(mut state: SimState<T>, horizon: T, times: &[T]) -> Result<Trajectory<T>> {
    let schedule = snapshot_schedule(horizon, times)?;
    let start = Instant::now();
    let dt = state.dt();
    let mut max_sweeps = state.last_solve().map_or(0, |s| s.sweeps);
    let mut snapshots = Vec::with_capacity(schedule.len());
    // Steps shorter than this fraction of dt are absorbed into the previous one.
    let slack = T::lit(1e-9);
    for &target in &schedule {
        while target - state.time() > slack * dt {
            let remaining = target - state.time();
            if remaining <= dt * (T::one() + slack) {
                state.step_by(remaining.min(dt))?;
                state.set_time(target);
            } else {
                state.step()?;
            }
            if let Some(s) = state.last_solve() {
                max_sweeps = max_sweeps.max(s.sweeps);
            }
        }
        let mut field = state.field().clone();
        field.set_time(target);
        snapshots.push(Snapshot {
            steps: state.steps(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            field,
        });
    }
    Ok(Trajectory {
        beta: state.beta(),
        dt,
        steps: state.steps(),
        max_sweeps,
        snapshots,
    })
}

/// Initial state of `scenario` on `domain`.
pub fn initial_state<T: Real>(
    scenario: &Scenario<T>,
    domain: &LatticeDomain<T>,
    opts: &SimulationOptions<T>,
) -> Result<SimState<T>> {
    let beta = opts.dynamics.beta;
    let f = scenario.nonlinearity(domain.eps());
    let data = extend_initial_data(&scenario.profile, domain, beta, &opts.quadrature)?;
    let closure = match (opts.closure, &data) {
        (ClosureKind::ZeroNormalDifference, _) => TruncationClosure::ZeroNormalDifference,
        (ClosureKind::Kernel, InitialData::Full(u)) => TruncationClosure::Dirichlet(u.clone()),
        (ClosureKind::Kernel, InitialData::Boundary(_)) => {
            TruncationClosure::from_kernel(&scenario.profile, domain, &opts.quadrature)?
        }
    };
    SimState::new(data, closure, f, &opts.dynamics)
}

/// Runs `scenario` on `domain` up to `horizon`.
pub fn simulate<T: Real>(
    scenario: &Scenario<T>,
    domain: &LatticeDomain<T>,
    horizon: T,
    times: &[T],
    opts: &SimulationOptions<T>,
) -> Result<Trajectory<T>> {
    simulate_from(initial_state(scenario, domain, opts)?, horizon, times)
}
