use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeDomain, LatticeField};
use crate::scalar::Real;

/// Compact space-time set `[-r, r]^{n-1} x [0, h] x [t_start, t_end]` on
/// which errors are measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window<T> {
    pub lateral_radius: T,
    pub height: T,
    pub t_start: T,
    pub t_end: T,
}

// Relative slack for deciding whether a lattice coordinate `eps * i` lies on
// the window edge; keeps membership identical across nested spacings.
const EDGE_SLACK: f64 = 1e-9;

impl<T: Real> Window<T> {
    pub fn new(lateral_radius: T, height: T, t_start: T, t_end: T) -> Result<Self> {
        if !(lateral_radius >= T::zero()) || !lateral_radius.is_finite() {
            return Err(invalid("lateral_radius", "must be finite and nonnegative"));
        }
        if !(height >= T::zero()) || !height.is_finite() {
            return Err(invalid("height", "must be finite and nonnegative"));
        }
        if !(t_start >= T::zero()) || !(t_end >= t_start) {
            return Err(invalid("time interval", "need 0 <= t_start <= t_end"));
        }
        Ok(Self {
            lateral_radius,
            height,
            t_start,
            t_end,
        })
    }

    /// Spatial-only window covering every time.
    pub fn spatial(lateral_radius: T, height: T) -> Result<Self> {
        Self::new(lateral_radius, height, T::zero(), T::infinity())
    }

    /// Checks that the window stays strictly inside the truncated domain so
    /// truncation faces never enter an error norm.
    pub fn check_inside(&self, domain: &LatticeDomain<T>) -> Result<()> {
        if domain.n() > 1 && !(self.lateral_radius < domain.lateral_extent()) {
            return Err(Error::WindowOutsideDomain(format!(
                "lateral radius {} reaches the lateral extent {}",
                self.lateral_radius,
                domain.lateral_extent()
            )));
        }
        if !(self.height < domain.height_extent()) {
            return Err(Error::WindowOutsideDomain(format!(
                "height {} reaches the domain height {}",
                self.height,
                domain.height_extent()
            )));
        }
        Ok(())
    }

    pub fn contains_time(&self, t: T) -> bool {
        t >= self.t_start && t <= self.t_end
    }

    /// Offsets of the lattice sites inside the spatial part of the window.
    pub fn sites(&self, domain: &LatticeDomain<T>) -> Vec<usize> {
        let slack = T::one() + T::lit(EDGE_SLACK);
        let eps = domain.eps();
        let r_index = (self.lateral_radius * slack / eps)
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX);
        let h_index = (self.height * slack / eps).floor().to_usize().unwrap_or(usize::MAX);
        (0..domain.site_count())
            .filter(|&o| domain.layer(o) <= h_index && domain.lateral_radius_index(o) <= r_index)
            .collect()
    }
}

/// `max |a - b|` over the lattice sites inside the window (time snapshot).
pub fn sup_error<T: Real>(a: &LatticeField<T>, b: &LatticeField<T>, window: &Window<T>) -> Result<T> {
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch);
    }
    window.check_inside(a.domain())?;
    let sites = window.sites(a.domain());
    if sites.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let (av, bv) = (a.values(), b.values());
    Ok(sites.into_iter().fold(T::zero(), |m, o| m.max((av[o] - bv[o]).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_error_examples() {
        let d = LatticeDomain::<f64>::new(2, 0.25, 12, 8).unwrap();
        let w = Window::spatial(2.0, 1.0).unwrap();
        let a = LatticeField::from_fn(d.clone(), |x| x[1]);
        let zero = LatticeField::constant(d.clone(), 0.0);
        assert_eq!(sup_error(&a, &a, &w).unwrap(), 0.0);
        assert_eq!(sup_error(&a, &zero, &w).unwrap(), 1.0);
        let shifted = LatticeField::from_fn(d, |x| x[1] + 0.3);
        assert!((sup_error(&shifted, &a, &w).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn window_membership_is_inclusive() {
        let d = LatticeDomain::<f64>::new(2, 0.4, 10, 8).unwrap();
        let w = Window::spatial(2.0, 1.2).unwrap();
        // lateral -5..=5 (11 values) times layers 0..=3.
        assert_eq!(w.sites(&d).len(), 11 * 4);
    }

    #[test]
    fn window_must_avoid_truncation_faces() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
        let f = LatticeField::constant(d.clone(), 0.0);
        let touching = Window::spatial(2.0, 1.0).unwrap();
        assert!(matches!(
            sup_error(&f, &f, &touching),
            Err(Error::WindowOutsideDomain(_))
        ));
        let tall = Window::spatial(1.0, 2.0).unwrap();
        assert!(tall.check_inside(&d).is_err());
        assert!(Window::spatial(1.5, 1.5).unwrap().check_inside(&d).is_ok());
        assert!(Window::<f64>::spatial(-1.0, 1.0).is_err());
        assert!(Window::new(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn shrinking_window_never_increases_error() {
        let d = LatticeDomain::<f64>::new(2, 0.25, 12, 12).unwrap();
        let a = LatticeField::from_fn(d.clone(), |x| (x[0] * 1.3).sin() + x[1] * x[1]);
        let b = LatticeField::constant(d, 0.1);
        let mut last = f64::INFINITY;
        for r in [2.5, 2.0, 1.0, 0.5, 0.0] {
            let e = sup_error(&a, &b, &Window::spatial(r, r).unwrap()).unwrap();
            assert!(e <= last);
            last = e;
        }
    }
}
