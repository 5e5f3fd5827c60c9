use crate::error::{invalid, Result};
use crate::lattice::LatticeDomain;
use crate::physics::Nonlinearity;
use crate::scalar::Real;

/// Largest forward-Euler step keeping every site update a nonnegative
/// combination of old values, scaled by `safety`.
///
/// Bulk threshold `β ε² / (2n)`, boundary threshold
/// `1 / ((2n - 1)/ε + sup|F'|)`.
pub fn stable_timestep<T: Real>(domain: &LatticeDomain<T>, beta: T, f: &Nonlinearity<T>, safety: T) -> Result<T> {
    if !(beta >= T::zero()) || !beta.is_finite() {
        return Err(invalid("beta", format!("must be finite and nonnegative, got {beta}")));
    }
    if !(safety > T::zero() && safety <= T::one()) {
        return Err(invalid("safety", format!("must lie in (0, 1], got {safety}")));
    }
    let n = domain.n();
    let eps = domain.eps();
    let boundary = (T::from_count(2 * n - 1) / eps + f.bounds().sup_prime).recip();
    let dt = if beta > T::zero() {
        let bulk = beta * eps * eps / T::from_count(2 * n);
        bulk.min(boundary)
    } else {
        boundary
    };
    Ok(safety * dt)
}
