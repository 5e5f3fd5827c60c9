//! One lattice state and the explicit update of the coupled system
//! `β u_t = Δ^ε u` in the bulk, `u_t = F(u) + D^ε u` on the boundary plane.

use std::sync::Arc;

use rayon::prelude::*;

use crate::dynamics::stable_timestep;
use crate::error::{invalid, Error, Result};
use crate::harmonic::{EllipticPlan, FaceRule, SolveStats, SolverOptions, TruncationClosure};
use crate::lattice::{BoundaryField, LatticeDomain, LatticeField, Stencil};
use crate::physics::{InitialData, Nonlinearity};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsOptions<T> {
    pub beta: T,
    /// Fraction of the stable step actually taken.
    pub safety: T,
    /// Optional cap on the step.
    pub max_dt: Option<T>,
    /// Fixed step overriding `safety`; must not exceed the stable step.
    pub dt: Option<T>,
    /// Bulk solves for `β = 0`.
    pub solver: SolverOptions<T>,
}

impl<T: Real> DynamicsOptions<T> {
    pub fn new(beta: T) -> Self {
        Self {
            beta,
            safety: T::lit(0.9),
            max_dt: None,
            dt: None,
            solver: SolverOptions::default(),
        }
    }

    /// Step used on `domain` with nonlinearity `f`.
    pub fn timestep(&self, domain: &LatticeDomain<T>, f: &Nonlinearity<T>) -> Result<T> {
        let mut dt = match self.dt {
            Some(dt) => {
                let limit = stable_timestep(domain, self.beta, f, T::one())?;
                if !(dt > T::zero()) || dt > limit {
                    return Err(invalid("dt", format!("fixed step {dt} outside (0, {limit}]")));
                }
                dt
            }
            None => stable_timestep(domain, self.beta, f, self.safety)?,
        };
        if let Some(cap) = self.max_dt {
            if !(cap > T::zero()) {
                return Err(invalid("max_dt", "must be positive"));
            }
            dt = dt.min(cap);
        }
        Ok(dt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Site {
    Face,
    Interior,
    Active,
}

/// Geometry shared by every step of a run.
#[derive(Debug)]
struct Layout<T> {
    stencil: Stencil<T>,
    kinds: Vec<Site>,
    /// `(face, source)` pairs of the copy rule, boundary plane included.
    copies: Vec<(usize, usize)>,
    plan: Option<EllipticPlan<T>>,
}

/// The evolving lattice state.
#[derive(Clone, Debug)]
pub struct SimState<T> {
    field: LatticeField<T>,
    beta: T,
    f: Nonlinearity<T>,
    rule: FaceRule,
    dt: T,
    steps: u64,
    solver: SolverOptions<T>,
    last_solve: Option<SolveStats<T>>,
    layout: Arc<Layout<T>>,
    scratch: Vec<T>,
}

impl<T: Real> SimState<T> {
    /// Builds the state at `t = 0`. For `β = 0` the bulk is the discrete
    /// harmonic extension of the boundary data; a full field, if given, only
    /// supplies the warm start.
    pub fn new(
        initial: InitialData<T>,
        closure: TruncationClosure<T>,
        f: Nonlinearity<T>,
        opts: &DynamicsOptions<T>,
    ) -> Result<Self> {
        let beta = opts.beta;
        let (domain, mut values) = match initial {
            InitialData::Full(field) => (field.domain().clone(), field.into_values()),
            InitialData::Boundary(g) => {
                if beta > T::zero() {
                    return Err(invalid("initial", "beta > 0 needs data on every site"));
                }
                let d = g.domain().clone();
                (d.clone(), midpoint_fill(&g, &closure))
            }
        };
        opts.solver.validate()?;
        let dt = opts.timestep(&domain, &f)?;
        let rule = closure.face_rule();
        closure.apply(&domain, &mut values)?;
        let kinds = (0..domain.site_count())
            .map(|o| {
                if domain.is_interior(o) {
                    Site::Interior
                } else if domain.is_active_boundary(o) {
                    Site::Active
                } else {
                    Site::Face
                }
            })
            .collect();
        let copies = match rule {
            FaceRule::Fixed => Vec::new(),
            FaceRule::CopyInward => domain
                .face_sites()
                .into_iter()
                .map(|o| (o, domain.inward_neighbor(o)))
                .filter(|&(o, s)| o != s)
                .collect(),
        };
        let plan = (beta == T::zero()).then(|| EllipticPlan::new(&domain, rule));
        let layout = Arc::new(Layout {
            stencil: Stencil::new(&domain),
            kinds,
            copies,
            plan,
        });
        let mut state = Self {
            field: LatticeField::from_values(domain, values, T::zero())?,
            beta,
            f,
            rule,
            dt,
            steps: 0,
            solver: opts.solver,
            last_solve: None,
            layout,
            scratch: Vec::new(),
        };
        state.copy_faces_in_field();
        if beta == T::zero() {
            state.elliptic_solve()?;
        }
        Ok(state)
    }

    pub fn field(&self) -> &LatticeField<T> {
        &self.field
    }

    pub fn domain(&self) -> &LatticeDomain<T> {
        self.field.domain()
    }

    pub fn boundary(&self) -> BoundaryField<T> {
        self.field.boundary()
    }

    pub fn time(&self) -> T {
        self.field.time()
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.f
    }

    pub fn face_rule(&self) -> FaceRule {
        self.rule
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Statistics of the latest bulk solve (`β = 0` only).
    pub fn last_solve(&self) -> Option<SolveStats<T>> {
        self.last_solve
    }

    pub fn solver_options(&self) -> &SolverOptions<T> {
        &self.solver
    }

    /// `max |Δ^ε u|` over interior sites.
    pub fn bulk_residual(&self) -> T {
        let st = &self.layout.stencil;
        let v = self.field.values();
        self.interior_iter()
            .map(|o| st.laplacian_at(v, o).abs())
            .reduce(T::zero, T::max)
    }

    fn interior_iter(&self) -> impl ParallelIterator<Item = usize> + '_ {
        let kinds = &self.layout.kinds;
        (0..kinds.len())
            .into_par_iter()
            .with_min_len(4096)
            .filter(move |&o| kinds[o] == Site::Interior)
    }

    /// One step of length `self.dt()`.
    pub fn step(&mut self) -> Result<()> {
        self.step_by(self.dt)
    }

    /// One step of length `dt <= self.dt()` (used to land on snapshot times).
    pub fn step_by(&mut self, dt: T) -> Result<()> {
        if !(dt > T::zero()) || dt > self.dt {
            return Err(invalid("dt", format!("step {dt} outside (0, {}]", self.dt)));
        }
        if self.beta > T::zero() {
            self.step_beta_positive(dt)
        } else {
            self.step_beta_zero(dt)
        }
    }

    /// Forward Euler on every site at once, reading only the old state.
    pub fn step_beta_positive(&mut self, dt: T) -> Result<()> {
        if !(self.beta > T::zero()) {
            return Err(invalid("beta", "step_beta_positive needs beta > 0"));
        }
        let layout = Arc::clone(&self.layout);
        let plane = self.domain().plane_len();
        let ratio = dt / self.beta;
        let f = self.f;
        let old = self.field.values();
        let mut new = std::mem::take(&mut self.scratch);
        new.resize(old.len(), T::zero());
        new.par_chunks_mut(plane)
            .with_min_len((4096 / plane).max(1))
            .enumerate()
            .for_each(|(layer, chunk)| {
                let base = layer * plane;
                for (k, x) in chunk.iter_mut().enumerate() {
                    let o = base + k;
                    let u = old[o];
                    *x = match layout.kinds[o] {
                        Site::Interior => u + ratio * layout.stencil.laplacian_at(old, o),
                        Site::Active => u + dt * (f.eval(u) + layout.stencil.boundary_at(old, o)),
                        Site::Face => u,
                    };
                }
            });
        for &(face, src) in &layout.copies {
            new[face] = new[src];
        }
        self.scratch = std::mem::replace(self.field.values_mut_unchecked(), new);
        self.finish_step(dt)
    }

    /// Boundary update against the current bulk, then a warm-started bulk solve.
    pub fn step_beta_zero(&mut self, dt: T) -> Result<()> {
        if self.beta != T::zero() {
            return Err(invalid("beta", "step_beta_zero needs beta = 0"));
        }
        let layout = Arc::clone(&self.layout);
        let plane = self.domain().plane_len();
        let f = self.f;
        let old = self.field.values();
        let mut new = std::mem::take(&mut self.scratch);
        (0..plane)
            .into_par_iter()
            .with_min_len(1024)
            .map(|o| {
                let u = old[o];
                match layout.kinds[o] {
                    Site::Active => u + dt * (f.eval(u) + layout.stencil.boundary_at(old, o)),
                    _ => u,
                }
            })
            .collect_into_vec(&mut new);
        let values = self.field.values_mut_unchecked();
        values[..plane].copy_from_slice(&new);
        self.scratch = new;
        for &(face, src) in &layout.copies {
            if face < plane {
                values[face] = values[src];
            }
        }
        self.field.set_time(self.field.time() + dt);
        self.steps += 1;
        if !self.field.values()[..plane].par_iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { step: self.steps });
        }
        self.elliptic_solve().map(|_| ())
    }

    /// Re-solves the bulk for the current boundary plane, warm-started from
    /// the current bulk values.
    pub fn elliptic_solve(&mut self) -> Result<SolveStats<T>> {
        let layout = Arc::clone(&self.layout);
        let plan = layout
            .plan
            .as_ref()
            .ok_or_else(|| invalid("beta", "bulk solves only exist for beta = 0"))?;
        let stats = plan.solve(self.field.values_mut_unchecked(), &self.solver)?;
        self.last_solve = Some(stats);
        Ok(stats)
    }

    fn finish_step(&mut self, dt: T) -> Result<()> {
        self.field.set_time(self.field.time() + dt);
        self.steps += 1;
        if !self.field.values().par_iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { step: self.steps });
        }
        Ok(())
    }

    fn copy_faces_in_field(&mut self) {
        let layout = Arc::clone(&self.layout);
        let v = self.field.values_mut_unchecked();
        for &(face, src) in &layout.copies {
            v[face] = v[src];
        }
    }

    /// Overrides the clock, e.g. to land exactly on a snapshot time.
    pub(crate) fn set_time(&mut self, t: T) {
        self.field.set_time(t);
    }
}

fn midpoint_fill<T: Real>(g: &BoundaryField<T>, closure: &TruncationClosure<T>) -> Vec<T> {
    let d = g.domain();
    let (mut lo, mut hi) = g.min_max();
    if let Some((a, b)) = closure.face_range() {
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut v = vec![lo + (hi - lo) * T::lit(0.5); d.site_count()];
    v[..d.plane_len()].copy_from_slice(g.values());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::Relaxation;

    fn opts(beta: f64) -> DynamicsOptions<f64> {
        DynamicsOptions::new(beta)
    }

    #[test]
    fn constants_are_fixed_points() {
        for beta in [0.0, 1.0] {
            let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
            let u = LatticeField::constant(d, 0.37);
            let mut s = SimState::new(
                InitialData::Full(u.clone()),
                TruncationClosure::Dirichlet(u.clone()),
                Nonlinearity::zero(),
                &opts(beta),
            )
            .unwrap();
            for _ in 0..10_000 {
                s.step().unwrap();
            }
            assert!(s.field().values().iter().all(|&v| v == 0.37));
            assert_eq!(s.steps(), 10_000);
        }
    }

    #[test]
    fn constant_forcing_one_step() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 3, 3).unwrap();
        let u = LatticeField::constant(d.clone(), 0.0);
        let mut s = SimState::new(
            InitialData::Full(u.clone()),
            TruncationClosure::Dirichlet(u),
            Nonlinearity::constant(1.0),
            &opts(1.0),
        )
        .unwrap();
        let dt = s.dt();
        s.step().unwrap();
        for o in 0..d.site_count() {
            let want = if d.is_active_boundary(o) { dt } else { 0.0 };
            assert_eq!(s.field().values()[o], want);
        }
        assert_eq!(s.time(), dt);
    }

    #[test]
    fn single_stencil_application() {
        // n = 1, eps = 1, beta = 1: u = (0, 1, 0, 0), dt = 0.25.
        let d = LatticeDomain::<f64>::new(1, 1.0, 0, 3).unwrap();
        let u = LatticeField::from_values(d, vec![0.0, 1.0, 0.0, 0.0], 0.0).unwrap();
        let o = DynamicsOptions {
            dt: Some(0.25),
            ..opts(1.0)
        };
        let mut s = SimState::new(
            InitialData::Full(u.clone()),
            TruncationClosure::Dirichlet(u),
            Nonlinearity::zero(),
            &o,
        )
        .unwrap();
        s.step().unwrap();
        assert_eq!(s.field().values()[1], 0.5);
        assert_eq!(s.field().values()[0], 0.25);
    }

    #[test]
    fn scalar_reduction_beta_zero() {
        let d = LatticeDomain::<f64>::new(1, 0.5, 0, 6).unwrap();
        let g = BoundaryField::constant(d, 0.25);
        let o = DynamicsOptions {
            max_dt: Some(0.01),
            ..opts(0.0)
        };
        let f = Nonlinearity::sinusoidal(crate::physics::INV_TWO_PI, 2.0 * std::f64::consts::PI);
        let mut s = SimState::new(
            InitialData::Boundary(g.clone()),
            TruncationClosure::ZeroNormalDifference,
            f,
            &o,
        )
        .unwrap();
        s.step().unwrap();
        let want = 0.25 - 0.01 / (2.0 * std::f64::consts::PI);
        assert!((s.field().values()[0] - want).abs() < 1e-12);
        assert!(s.field().values().iter().all(|v| (v - want).abs() < 1e-9));

        let mut s = SimState::new(
            InitialData::Boundary(g),
            TruncationClosure::ZeroNormalDifference,
            Nonlinearity::constant(1.0),
            &o,
        )
        .unwrap();
        for k in 1..=50 {
            s.step().unwrap();
            // exact up to the bulk solve tolerance feeding D^ε
            assert!((s.field().values()[0] - 0.25 - k as f64 * 0.01).abs() < 1e-9);
            assert!(s.bulk_residual() <= s.solver_options().tol);
        }
    }

    #[test]
    fn resolve_is_idempotent() {
        let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
        let g = BoundaryField::from_fn(d, |z| (z[0]).atan());
        let o = DynamicsOptions {
            solver: SolverOptions {
                relaxation: Relaxation::OptimalSor,
                ..SolverOptions::with_tol(1e-11)
            },
            ..opts(0.0)
        };
        let mut s = SimState::new(
            InitialData::Boundary(g),
            TruncationClosure::ZeroNormalDifference,
            Nonlinearity::zero(),
            &o,
        )
        .unwrap();
        assert!(s.last_solve().unwrap().sweeps > 0);
        assert_eq!(s.elliptic_solve().unwrap().sweeps, 0);
    }

    #[test]
    fn detects_blow_up() {
        let d = LatticeDomain::<f64>::new(1, 1.0, 0, 2).unwrap();
        let u = LatticeField::constant(d, 0.0);
        let o = DynamicsOptions {
            dt: Some(0.5),
            ..opts(1.0)
        };
        let mut s = SimState::new(
            InitialData::Full(u.clone()),
            TruncationClosure::Dirichlet(u),
            Nonlinearity::constant(f64::MAX),
            &o,
        )
        .unwrap();
        let err = (0..20).find_map(|_| s.step().err()).expect("overflow within 20 steps");
        assert!(matches!(err, Error::NonFinite { .. }));
        assert!(s.step_by(1.0).is_err());
    }
}
