use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Surface measure `ω_n` of the unit sphere `S^{n-1} ⊂ R^n`.
pub fn sphere_measure<T: Real>(n: usize) -> T {
    // ω_1 = 2, ω_2 = 2π, ω_{n+2} = 2π ω_n / n
    let (mut k, mut w) = if n % 2 == 1 {
        (1usize, T::lit(2.0))
    } else {
        (2usize, T::TAU())
    };
    while k < n {
        w = w * T::TAU() / T::from_count(k);
        k += 2;
    }
    w
}

/// Half-space Poisson kernel `H(z', z_n) = 2 z_n / (ω_n (z_n² + |z'|²)^{n/2})`
/// with `n = z'.len() + 1`.
pub fn poisson_kernel<T: Real>(zprime: &[T], zn: T) -> Result<T> {
    if !(zn > T::zero()) {
        return Err(invalid("zn", format!("kernel height must be positive, got {zn}")));
    }
    let n = zprime.len() + 1;
    if n < 2 {
        return Err(invalid("zprime", "the kernel needs n >= 2"));
    }
    let r2 = zprime.iter().fold(T::zero(), |s, &z| s + z * z);
    Ok(kernel_radial(n, r2.sqrt(), zn))
}

/// `H` as a function of the lateral distance `r = |z'|`.
#[inline]
pub(crate) fn kernel_radial<T: Real>(n: usize, r: T, zn: T) -> T {
    let q = zn * zn + r * r;
    T::lit(2.0) * zn / (sphere_measure::<T>(n) * q.powf(T::from_count(n) * T::lit(0.5)))
}
