//! Poisson-kernel extension `u_0^c(x) = ∫ H(x' - z', x_n) u_0(z') dz'`.
//!
//! The lateral integral is mapped to angles around `x'`:
//! `z' - x' = x_n tan θ` for `n = 2` and `|z' - x'| = x_n tan ψ` (with a polar
//! angle `φ`) for `n = 3`. The kernel is still evaluated explicitly, so the
//! normalization `∫ H = 1` is a genuine check of `H`. The integral is
//! truncated at `|z' - x'| = R` and the remaining kernel mass is integrated
//! analytically against the far-field limits of `u_0`.

use crate::error::{invalid, Error, Result};
use crate::harmonic::kernel::kernel_radial;
use crate::harmonic::quadrature::{integrate, Estimate};
use crate::physics::BoundaryProfile;
use crate::scalar::Real;

/// Discretization of the kernel integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelQuadrature<T> {
    /// Lateral truncation radius `R` (physical length).
    pub truncation_radius: T,
    /// Initial panels per integration axis.
    pub panels: usize,
    /// Add the analytic kernel tail beyond `R` weighted by the far-field limits.
    pub tail_correction: bool,
    /// Absolute error target of the adaptive panels.
    pub tolerance: T,
    pub max_panels: usize,
}

impl<T: Real> Default for KernelQuadrature<T> {
    fn default() -> Self {
        Self {
            truncation_radius: T::lit(1e4),
            panels: 16,
            tail_correction: true,
            tolerance: T::lit(1e-10),
            max_panels: 4000,
        }
    }
}

impl<T: Real> KernelQuadrature<T> {
    pub fn with_tolerance(tolerance: T) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 8 {
            return Err(invalid("panels", "need at least 8 panels per axis"));
        }
        if !(self.truncation_radius > T::zero()) {
            return Err(invalid("truncation_radius", "must be positive"));
        }
        if !(self.tolerance > T::zero()) {
            return Err(invalid("tolerance", "must be positive"));
        }
        Ok(())
    }

    fn check_height(&self, xn: T) -> Result<()> {
        if !(xn > T::zero()) {
            return Err(invalid("x_n", format!("evaluation height must be positive, got {xn}")));
        }
        if !(self.truncation_radius >= T::lit(8.0) * xn) {
            return Err(invalid(
                "truncation_radius",
                format!(
                    "radius {} is below 8 x the evaluation height {xn}",
                    self.truncation_radius
                ),
            ));
        }
        Ok(())
    }
}

/// Value of `u_0^c` with the quadrature's error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionValue<T> {
    pub value: T,
    pub error_estimate: T,
    /// Set when the estimate exceeds the configured tolerance.
    pub flagged: bool,
}

fn inner_tolerance<T: Real>(q: &KernelQuadrature<T>) -> T {
    q.tolerance * T::lit(0.5)
}

/// Integrates `u(z')` against `H(x' - z', x_n)` for `n ∈ {2, 3}`.
fn kernel_integral<T: Real>(
    n: usize,
    xprime: &[T],
    xn: T,
    q: &KernelQuadrature<T>,
    mut u: impl FnMut(&[T]) -> T,
    tail: (T, T, T),
) -> Result<Estimate<T>> {
    q.check_height(xn)?;
    let (tail_minus, tail_plus, tail_mean) = tail;
    match n {
        2 => {
            let theta_r = (q.truncation_radius / xn).atan();
            let mut z = [T::zero()];
            let body = integrate(
                |theta: T| {
                    let c = theta.cos();
                    let s = xn * theta.tan();
                    z[0] = xprime[0] + s;
                    kernel_radial(2, s.abs(), xn) * xn / (c * c) * u(&z)
                },
                -theta_r,
                theta_r,
                q.panels,
                q.tolerance,
                q.max_panels,
            );
            let mut value = body.value;
            if q.tail_correction {
                let side = (xn / q.truncation_radius).atan() * T::FRAC_1_PI();
                value = value + side * (tail_minus + tail_plus);
            }
            Ok(Estimate {
                value,
                error: body.error,
            })
        }
        3 => {
            let psi_r = (q.truncation_radius / xn).atan();
            let inner_tol = inner_tolerance(q);
            let mut worst_inner = T::zero();
            let mut z = [T::zero(); 2];
            let body = integrate(
                |psi: T| {
                    let c = psi.cos();
                    let r = xn * psi.tan();
                    let weight = kernel_radial(3, r, xn) * r * xn / (c * c);
                    let ring = integrate(
                        |phi: T| {
                            z[0] = xprime[0] + r * phi.cos();
                            z[1] = xprime[1] + r * phi.sin();
                            u(&z)
                        },
                        T::zero(),
                        T::TAU(),
                        q.panels,
                        inner_tol,
                        q.max_panels,
                    );
                    worst_inner = worst_inner.max(ring.error);
                    weight * ring.value
                },
                T::zero(),
                psi_r,
                q.panels,
                inner_tol,
                q.max_panels,
            );
            let mut value = body.value;
            if q.tail_correction {
                let mass = xn / (xn * xn + q.truncation_radius * q.truncation_radius).sqrt();
                value = value + mass * tail_mean;
            }
            // The kernel weight integrates to at most 1, so inner errors add at most their sup.
            Ok(Estimate {
                value,
                error: body.error + worst_inner,
            })
        }
        _ => Err(Error::UnsupportedDimension("continuous harmonic extension", n)),
    }
}

/// Poisson extension of `u0` evaluated at `x = (x', x_n)` with `x_n > 0`.
pub fn continuous_extension<T: Real>(
    u0: &BoundaryProfile<T>,
    x: &[T],
    q: &KernelQuadrature<T>,
) -> Result<ExtensionValue<T>> {
    let n = u0.n();
    if x.len() != n {
        return Err(invalid("x", format!("expected a point in R^{n}")));
    }
    let xn = x[n - 1];
    if n == 1 {
        // The boundary is a single point; bounded harmonic functions on the half-line are constant.
        if !(xn > T::zero()) {
            return Err(invalid("x_n", "evaluation height must be positive"));
        }
        return Ok(ExtensionValue {
            value: u0.value(&[]),
            error_estimate: T::zero(),
            flagged: false,
        });
    }
    if n > 3 {
        return Err(Error::UnsupportedDimension("continuous harmonic extension", n));
    }
    q.check_height(xn)?;
    let (lo, hi) = u0.inf_sup();
    if lo == hi {
        // The kernel has unit mass, so constants extend exactly.
        return Ok(ExtensionValue {
            value: lo,
            error_estimate: T::zero(),
            flagged: false,
        });
    }
    let mut axis = vec![T::zero(); n - 1];
    axis[0] = -T::one();
    let minus = u0.asymptote(&axis);
    axis[0] = T::one();
    let tails = (minus, u0.asymptote(&axis), u0.mean_asymptote());
    let est = kernel_integral(n, &x[..n - 1], xn, q, |z| u0.value(z), tails)?;
    Ok(ExtensionValue {
        value: est.value,
        error_estimate: est.error,
        flagged: est.error > q.tolerance,
    })
}

/// Quadrature of `H(x' - z', x_n)` over the whole boundary (ideally 1).
pub fn kernel_mass<T: Real>(n: usize, xn: T, q: &KernelQuadrature<T>) -> Result<Estimate<T>> {
    let xprime = vec![T::zero(); n.saturating_sub(1)];
    kernel_integral(n, &xprime, xn, q, |_| T::one(), (T::one(), T::one(), T::one()))
}
