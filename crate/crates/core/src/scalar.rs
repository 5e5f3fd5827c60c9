//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the lattice machinery is generic over.
///
/// Implemented for `f32` and `f64`. Everything transcendental in the crate
/// (square roots, arctangents, sines) needs a real field, so exact rational
/// types are not supported.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the target type cannot
    /// represent finite values at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal is representable")
    }

    #[inline]
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Positive part `max(x, 0)`.
#[inline]
pub fn positive_part<T: Real>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}
