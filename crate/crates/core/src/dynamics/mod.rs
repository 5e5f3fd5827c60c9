//! Time evolution of the lattice system for `β > 0` (explicit ODE stepping)
//! and `β = 0` (explicit boundary stepping with a bulk Laplace solve), plus
//! the barrier and ordering audits.

mod barrier;
mod run;
mod state;
mod timestep;

pub use barrier::{barrier_audit, ordering_audit, sup_norm, BarrierPair, BarrierReport, BarrierRow};
pub use run::{
    initial_state, simulate, simulate_from, snapshot_schedule, ClosureKind, SimulationOptions, Snapshot, Trajectory,
};
pub use state::{DynamicsOptions, SimState};
pub use timestep::stable_timestep;
