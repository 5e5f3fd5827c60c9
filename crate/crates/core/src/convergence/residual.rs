use rayon::prelude::*;

use crate::dynamics::SimState;
use crate::error::Result;
use crate::lattice::Stencil;
use crate::scalar::Real;

/// Pointwise equation residuals after one step, with `u_t` taken as the
/// one-step difference quotient and the operators evaluated at the new state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport<T> {
    pub time: T,
    pub dt: T,
    /// `max |β u_t − Δ^ε u|` over interior sites.
    pub bulk: T,
    /// `max |u_t − F(u) − D^ε u|` over active boundary sites.
    pub boundary: T,
}

/// Takes a trial step from a copy of `state`; `state` itself is unchanged.
pub fn residual_report<T: Real>(state: &SimState<T>) -> Result<ResidualReport<T>> {
    let mut next = state.clone();
    next.step()?;
    let dt = state.dt();
    let d = state.domain();
    let st = Stencil::new(d);
    let (old, new) = (state.field().values(), next.field().values());
    let beta = state.beta();
    let f = state.nonlinearity();
    let bulk = d
        .interior_sites()
        .par_iter()
        .map(|&o| (beta * (new[o] - old[o]) / dt - st.laplacian_at(new, o)).abs())
        .reduce(T::zero, T::max);
    let boundary = d
        .active_boundary_sites()
        .par_iter()
        .map(|&o| ((new[o] - old[o]) / dt - f.eval(new[o]) - st.boundary_at(new, o)).abs())
        .reduce(T::zero, T::max);
    Ok(ResidualReport {
        time: state.time(),
        dt,
        bulk,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DynamicsOptions;
    use crate::harmonic::TruncationClosure;
    use crate::lattice::{BoundaryField, LatticeDomain, LatticeField};
    use crate::physics::{InitialData, Nonlinearity};

    #[test]
    fn equilibrium_has_zero_residual() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 3, 3).unwrap();
        let u = LatticeField::constant(d, 0.2);
        let s = SimState::new(
            InitialData::Full(u.clone()),
            TruncationClosure::Dirichlet(u),
            Nonlinearity::zero(),
            &DynamicsOptions::new(1.0),
        )
        .unwrap();
        let r = residual_report(&s).unwrap();
        assert_eq!((r.bulk, r.boundary), (0.0, 0.0));
        assert_eq!(s.steps(), 0);
    }

    #[test]
    fn constant_forcing_scalar_reduction() {
        let d = LatticeDomain::<f64>::new(1, 0.5, 0, 4).unwrap();
        let g = BoundaryField::constant(d, 0.0);
        let o = DynamicsOptions {
            max_dt: Some(1e-3),
            ..DynamicsOptions::new(0.0)
        };
        let s = SimState::new(
            InitialData::Boundary(g),
            TruncationClosure::ZeroNormalDifference,
            Nonlinearity::constant(1.0),
            &o,
        )
        .unwrap();
        let r = residual_report(&s).unwrap();
        assert!(r.boundary < 1e-8, "{}", r.boundary);
        assert!(r.bulk <= o.solver.tol);
    }
}
