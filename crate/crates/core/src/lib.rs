//! Overdamped Frenkel-Kontorova lattice dynamics in a half-space and the
//! numerical experiments that compare it with its Peierls-Nabarro limit.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the usual double-precision choice.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod harmonic;
pub mod lattice;
pub mod physics;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type LatticeDomain64 = lattice::LatticeDomain<f64>;
pub type LatticeField64 = lattice::LatticeField<f64>;
pub type BoundaryField64 = lattice::BoundaryField<f64>;
pub type Window64 = lattice::Window<f64>;
pub type Nonlinearity64 = physics::Nonlinearity<f64>;
pub type BoundaryProfile64 = physics::BoundaryProfile<f64>;
pub type Scenario64 = physics::Scenario<f64>;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
