use crate::error::{invalid, Error, Result};
use crate::lattice::LatticeDomain;
use crate::scalar::Real;

/// Displacement values on every site of a [`LatticeDomain`] at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField<T> {
    domain: LatticeDomain<T>,
    values: Vec<T>,
    time: T,
}

impl<T: Real> LatticeField<T> {
    pub fn from_values(domain: LatticeDomain<T>, values: Vec<T>, time: T) -> Result<Self> {
        if values.len() != domain.site_count() {
            return Err(invalid(
                "values",
                format!("expected {} values, got {}", domain.site_count(), values.len()),
            ));
        }
        check_finite(&values)?;
        Ok(Self { domain, values, time })
    }

    pub fn constant(domain: LatticeDomain<T>, c: T) -> Self {
        let values = vec![c; domain.site_count()];
        Self {
            domain,
            values,
            time: T::zero(),
        }
    }

    /// Samples `f` at the physical position of every site.
    pub fn from_fn(domain: LatticeDomain<T>, mut f: impl FnMut(&[T]) -> T) -> Self {
        let values = (0..domain.site_count()).map(|o| f(&domain.position(o))).collect();
        Self {
            domain,
            values,
            time: T::zero(),
        }
    }

    #[inline]
    pub fn domain(&self) -> &LatticeDomain<T> {
        &self.domain
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Storage access for in-place solvers; callers keep the length fixed.
    #[inline]
    pub(crate) fn values_mut_unchecked(&mut self) -> &mut Vec<T> {
        &mut self.values
    }

    #[inline]
    pub fn time(&self) -> T {
        self.time
    }

    pub fn set_time(&mut self, t: T) {
        self.time = t;
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.time = t;
        self
    }

    /// Value at integer index, if the site exists.
    pub fn get(&self, index: &[i64]) -> Option<T> {
        self.domain.offset(index).map(|o| self.values[o])
    }

    pub fn sup_norm(&self) -> T {
        sup_abs(&self.values)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trace on the boundary plane.
    pub fn boundary(&self) -> BoundaryField<T> {
        BoundaryField {
            domain: self.domain.clone(),
            values: self.values[..self.domain.plane_len()].to_vec(),
            time: self.time,
        }
    }

    /// Overwrites the boundary plane with `trace`.
    pub fn set_boundary(&mut self, trace: &BoundaryField<T>) -> Result<()> {
        if trace.domain != self.domain {
            return Err(Error::DomainMismatch);
        }
        let p = self.domain.plane_len();
        self.values[..p].copy_from_slice(&trace.values);
        Ok(())
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Values on the boundary plane `i_n = 0` only.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryField<T> {
    domain: LatticeDomain<T>,
    values: Vec<T>,
    time: T,
}

impl<T: Real> BoundaryField<T> {
    pub fn from_values(domain: LatticeDomain<T>, values: Vec<T>, time: T) -> Result<Self> {
        if values.len() != domain.plane_len() {
            return Err(invalid(
                "values",
                format!("expected {} boundary values, got {}", domain.plane_len(), values.len()),
            ));
        }
        check_finite(&values)?;
        Ok(Self { domain, values, time })
    }

    pub fn constant(domain: LatticeDomain<T>, c: T) -> Self {
        let values = vec![c; domain.plane_len()];
        Self {
            domain,
            values,
            time: T::zero(),
        }
    }

    /// Samples `f` at the lateral coordinates `x'` of every boundary site.
    pub fn from_fn(domain: LatticeDomain<T>, mut f: impl FnMut(&[T]) -> T) -> Self {
        let n = domain.n();
        let values = (0..domain.plane_len())
            .map(|o| f(&domain.position(o)[..n - 1]))
            .collect();
        Self {
            domain,
            values,
            time: T::zero(),
        }
    }

    #[inline]
    pub fn domain(&self) -> &LatticeDomain<T> {
        &self.domain
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn time(&self) -> T {
        self.time
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.time = t;
        self
    }

    pub fn sup_norm(&self) -> T {
        sup_abs(&self.values)
    }

    pub fn min_max(&self) -> (T, T) {
        min_max(&self.values)
    }
}

pub(crate) fn sup_abs<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

pub(crate) fn min_max<T: Real>(values: &[T]) -> (T, T) {
    values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn check_finite<T: Real>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(invalid("values", format!("non-finite value at offset {i}"))),
        None => Ok(()),
    }
}
