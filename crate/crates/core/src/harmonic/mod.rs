//! Harmonic extensions of boundary data: the Poisson-kernel integral, the
//! lattice Laplace solve, and measured decay of both.

mod continuous;
mod decay;
mod discrete;
mod kernel;
pub mod quadrature;
mod solver;

pub use continuous::{continuous_extension, kernel_mass, ExtensionValue, KernelQuadrature};
pub use decay::{decay_report, DecayRow, DecaySampling, ExtensionReport, DECAY_CSV_HEADER};
pub use discrete::{discrete_extension, discrete_extension_with_stats, TruncationClosure};
pub use kernel::{poisson_kernel, sphere_measure};
pub use solver::{EllipticPlan, FaceRule, Relaxation, SolveStats, SolverOptions};
