//! Runtime audits: the explicit barriers sandwiching the solution and the
//! ordering of two trajectories.

use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::harmonic::KernelQuadrature;
use crate::lattice::{sup_abs, LatticeDomain, LatticeField, Stencil};
use crate::physics::{sample_extension, BoundaryProfile, Nonlinearity};
use crate::scalar::{positive_part, Real};

/// Barriers of a scenario built from samples of `u_0^c`.
///
/// `ū^± = u_0^c ± C (√(1 + x_n) − 1 + t)`, the flat bound
/// `‖u_0‖∞ + t ‖F‖∞`, and for `β > 0` the cone `|u − u_0| ≤ t C_β`.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierPair<T> {
    u0c: LatticeField<T>,
    /// `C`, already doubled.
    pub c: T,
    pub sup_f: T,
    pub sup_u0: T,
    /// `C_β`, present when `β > 0`.
    pub c_beta: Option<T>,
    /// `sup |D^ε[u_0^c]|` over the active boundary plane.
    pub sup_d_eps: T,
    /// `sup (1 + x_n)^{3/2} |Δ^ε[u_0^c]|` over interior sites.
    pub sup_lap_env: T,
}

impl<T: Real> BarrierPair<T> {
    /// Barriers around the samples `u0c` (with `u_0` on the boundary plane).
    pub fn new(u0c: LatticeField<T>, f: &Nonlinearity<T>, beta: T) -> Result<Self> {
        if !(beta >= T::zero()) {
            return Err(invalid("beta", "must be nonnegative"));
        }
        let d = u0c.domain();
        let st = Stencil::new(d);
        let v = u0c.values();
        let sup_d_eps = d
            .active_boundary_sites()
            .par_iter()
            .map(|&o| st.boundary_at(v, o).abs())
            .reduce(T::zero, T::max);
        let interior = d.interior_sites();
        let sup_lap = interior
            .par_iter()
            .map(|&o| st.laplacian_at(v, o).abs())
            .reduce(T::zero, T::max);
        let sup_lap_env = interior
            .par_iter()
            .map(|&o| {
                let xn = d.eps() * T::from_count(d.layer(o));
                (T::one() + xn).powf(T::lit(1.5)) * st.laplacian_at(v, o).abs()
            })
            .reduce(T::zero, T::max);
        let sup_f = f.bounds().sup;
        let two = T::lit(2.0);
        // Boundary: C ≥ sup F + sup|D^ε u_0^c| + C/2. Bulk: C ≥ 4 (1+x_n)^{3/2} |Δ^ε u_0^c|.
        let c = two * (two * (sup_f + sup_d_eps)).max(T::lit(4.0) * sup_lap_env);
        let c_beta = (beta > T::zero()).then(|| (sup_lap / beta).max(sup_f + sup_d_eps));
        Ok(Self {
            sup_u0: u0c.boundary().sup_norm(),
            u0c,
            c,
            sup_f,
            c_beta,
            sup_d_eps,
            sup_lap_env,
        })
    }

    /// Samples `u_0^c` from the profile and builds the barriers.
    pub fn from_profile(
        profile: &BoundaryProfile<T>,
        domain: &LatticeDomain<T>,
        f: &Nonlinearity<T>,
        beta: T,
        q: &KernelQuadrature<T>,
    ) -> Result<Self> {
        let sites: Vec<usize> = (0..domain.site_count()).collect();
        let values = sample_extension(profile, domain, q, &sites)?;
        Self::new(LatticeField::from_values(domain.clone(), values, T::zero())?, f, beta)
    }

    pub fn u0c(&self) -> &LatticeField<T> {
        &self.u0c
    }

    pub fn upper(&self, offset: usize, t: T) -> T {
        self.u0c.values()[offset] + self.c * (self.lift(offset) + t)
    }

    pub fn lower(&self, offset: usize, t: T) -> T {
        self.u0c.values()[offset] - self.c * (self.lift(offset) + t)
    }

    pub fn flat(&self, t: T) -> T {
        self.sup_u0 + t * self.sup_f
    }

    fn lift(&self, offset: usize) -> T {
        let d = self.u0c.domain();
        let xn = d.eps() * T::from_count(d.layer(offset));
        (T::one() + xn).sqrt() - T::one()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierRow<T> {
    pub time: T,
    /// `max (u − ū^+)⁺`.
    pub upper: T,
    /// `max (ū^− − u)⁺`.
    pub lower: T,
    /// `max (|u| − ‖u_0‖∞ − t‖F‖∞)⁺`.
    pub flat: T,
    /// `max (|u − u_0| − t C_β)⁺` when `β > 0`.
    pub beta_cone: Option<T>,
}

impl<T: Real> BarrierRow<T> {
    pub fn worst(&self) -> T {
        self.upper
            .max(self.lower)
            .max(self.flat)
            .max(self.beta_cone.unwrap_or(T::zero()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarrierReport<T> {
    pub c: T,
    pub c_beta: Option<T>,
    pub sup_f: T,
    pub rows: Vec<BarrierRow<T>>,
}

impl<T: Real> BarrierReport<T> {
    pub fn max_violation(&self) -> T {
        self.rows.iter().fold(T::zero(), |m, r| m.max(r.worst()))
    }

    /// Worst of the `ū^±` and flat-bound columns.
    pub fn max_uniform_violation(&self) -> T {
        self.rows
            .iter()
            .fold(T::zero(), |m, r| m.max(r.upper).max(r.lower).max(r.flat))
    }

    pub fn max_beta_violation(&self) -> Option<T> {
        self.c_beta.map(|_| {
            self.rows
                .iter()
                .fold(T::zero(), |m, r| m.max(r.beta_cone.unwrap_or(T::zero())))
        })
    }
}

/// Per-snapshot positive violations of every barrier.
///
/// The `β > 0` cone is measured against the trajectory's own initial field.
pub fn barrier_audit<T: Real>(traj: &Trajectory<T>, b: &BarrierPair<T>) -> Result<BarrierReport<T>> {
    if !traj.domain().same_lattice(b.u0c.domain()) {
        return Err(Error::DomainMismatch);
    }
    let u0 = traj.initial().values();
    let c_beta = if traj.beta > T::zero() { b.c_beta } else { None };
    let rows = traj
        .snapshots
        .iter()
        .map(|snap| {
            let t = snap.time();
            let v = snap.field.values();
            let flat_level = b.flat(t);
            let (upper, lower, flat, cone) = (0..v.len())
                .into_par_iter()
                .with_min_len(4096)
                .map(|o| {
                    let u = v[o];
                    let cone = c_beta.map_or(T::zero(), |cb| positive_part((u - u0[o]).abs() - t * cb));
                    (
                        positive_part(u - b.upper(o, t)),
                        positive_part(b.lower(o, t) - u),
                        positive_part(u.abs() - flat_level),
                        cone,
                    )
                })
                .reduce(
                    || (T::zero(), T::zero(), T::zero(), T::zero()),
                    |a, c| (a.0.max(c.0), a.1.max(c.1), a.2.max(c.2), a.3.max(c.3)),
                );
            BarrierRow {
                time: t,
                upper,
                lower,
                flat,
                beta_cone: c_beta.map(|_| cone),
            }
        })
        .collect();
    Ok(BarrierReport {
        c: b.c,
        c_beta,
        sup_f: b.sup_f,
        rows,
    })
}

/// `max (a − b)⁺` over all snapshots and sites. Requires `a ≤ b` at `t = 0`.
pub fn ordering_audit<T: Real>(a: &Trajectory<T>, b: &Trajectory<T>) -> Result<T> {
    if !a.domain().same_lattice(b.domain()) {
        return Err(Error::DomainMismatch);
    }
    if a.times() != b.times() {
        return Err(invalid("trajectories", "snapshot times differ"));
    }
    let gap = |x: &LatticeField<T>, y: &LatticeField<T>| {
        x.values()
            .par_iter()
            .zip(y.values())
            .map(|(&p, &q)| positive_part(p - q))
            .reduce(T::zero, T::max)
    };
    let excess = gap(a.initial(), b.initial());
    if excess > T::zero() {
        return Err(Error::OrderingPrecondition {
            excess: excess.as_f64(),
        });
    }
    Ok(a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(p, q)| gap(&p.field, &q.field))
        .fold(T::zero(), T::max))
}

/// `sup |u|` over a field, exposed for the flat-bound checks.
pub fn sup_norm<T: Real>(f: &LatticeField<T>) -> T {
    sup_abs(f.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, SimulationOptions};
    use crate::physics::{Forcing, Scenario};

    #[test]
    fn constant_data_has_no_violations() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
        let s = Scenario::new(
            Forcing::Fixed(Nonlinearity::zero()),
            BoundaryProfile::constant(2, 0.3).unwrap(),
        );
        for beta in [0.0, 1.0] {
            let t = simulate(&s, &d, 0.5, &[], &SimulationOptions::new(beta)).unwrap();
            let b = BarrierPair::from_profile(
                &s.profile,
                &d,
                &Nonlinearity::zero(),
                beta,
                &KernelQuadrature::default(),
            )
            .unwrap();
            let r = barrier_audit(&t, &b).unwrap();
            assert_eq!(r.max_violation(), 0.0);
            assert_eq!(b.c, 0.0);
        }
    }

    #[test]
    fn ordering_of_shifted_constants() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
        let p = BoundaryProfile::arctan(2, 0, 1.0, 0.0, 0.5).unwrap();
        let f = Forcing::Fixed(Nonlinearity::zero());
        let o = SimulationOptions::new(1.0);
        let a = simulate(&Scenario::new(f, p), &d, 0.5, &[0.25], &o).unwrap();
        let b = simulate(&Scenario::new(f, p.shifted(0.1)), &d, 0.5, &[0.25], &o).unwrap();
        assert!(ordering_audit(&a, &b).unwrap() <= 0.0);
        assert_eq!(ordering_audit(&a, &a).unwrap(), 0.0);
        assert!(matches!(
            ordering_audit(&b, &a),
            Err(Error::OrderingPrecondition { .. })
        ));
        // the gap is preserved by the linear dynamics
        for (x, y) in a.last().values().iter().zip(b.last().values()) {
            assert!((y - x - 0.1).abs() < 1e-9);
        }
    }
}
