//! Lattice geometry, fields, the discrete operators, nested-lattice
//! restriction and windowed sup norms.

mod domain;
mod field;
pub mod io;
mod operators;
mod restrict;
mod window;

pub use domain::{LatticeDomain, DEFAULT_SITE_BUDGET};
pub use field::{BoundaryField, LatticeField};
pub use operators::{discrete_boundary_operator, discrete_laplacian, Stencil};
pub use restrict::{nesting_level, restrict};
pub use window::{sup_error, Window};

pub(crate) use field::{min_max, sup_abs};
