//! Red-black relaxation for `Δ^ε u = 0` on the interior sites.
//!
//! Sites of one colour never neighbour each other, so every colour phase is
//! computed in parallel into a buffer and then scattered. The result does not
//! depend on the number of threads. With `ω = 1` every update is the average
//! of the `2n` neighbours, which keeps iterates inside the data range.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeDomain, Stencil};
use crate::scalar::Real;

/// Relaxation factor of the red-black sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relaxation<T> {
    /// `ω = 1`; iterates are convex combinations of the data.
    GaussSeidel,
    Sor(T),
    /// `ω` from the Jacobi spectral radius of the truncated box.
    OptimalSor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T> {
    /// Target for `max |Δ^ε u|` over interior sites.
    pub tol: T,
    pub max_sweeps: usize,
    /// Sweeps between residual evaluations.
    pub check_every: usize,
    pub relaxation: Relaxation<T>,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_sweeps: 200_000,
            check_every: 10,
            relaxation: Relaxation::OptimalSor,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(invalid("tol", "residual tolerance must be positive"));
        }
        if self.check_every == 0 {
            return Err(invalid("check_every", "must be at least 1"));
        }
        if let Relaxation::Sor(w) = self.relaxation {
            if !(w > T::zero() && w < T::lit(2.0)) {
                return Err(invalid("relaxation", format!("SOR factor {w} outside (0, 2)")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats<T> {
    pub sweeps: usize,
    pub residual: T,
}

/// How the truncation faces above the boundary plane behave during a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceRule {
    /// Face values are data and never change.
    Fixed,
    /// Each face copies its nearest non-face site after every colour phase.
    CopyInward,
}

/// Precomputed colouring and face map of a domain.
#[derive(Clone, Debug)]
pub struct EllipticPlan<T> {
    domain: LatticeDomain<T>,
    stencil: Stencil<T>,
    interior: Vec<usize>,
    colors: [Vec<usize>; 2],
    faces: Vec<(usize, usize)>,
    rule: FaceRule,
}

impl<T: Real> EllipticPlan<T> {
    pub fn new(domain: &LatticeDomain<T>, rule: FaceRule) -> Self {
        let interior = domain.interior_sites();
        let mut colors = [Vec::new(), Vec::new()];
        for &o in &interior {
            let parity = domain.index(o).iter().sum::<i64>().rem_euclid(2) as usize;
            colors[parity].push(o);
        }
        let faces = match rule {
            FaceRule::Fixed => Vec::new(),
            FaceRule::CopyInward => domain
                .face_sites()
                .into_iter()
                .filter(|&o| domain.layer(o) > 0)
                .map(|o| (o, domain.inward_neighbor(o)))
                .collect(),
        };
        Self {
            domain: domain.clone(),
            stencil: Stencil::new(domain),
            interior,
            colors,
            faces,
            rule,
        }
    }

    pub fn domain(&self) -> &LatticeDomain<T> {
        &self.domain
    }

    pub fn rule(&self) -> FaceRule {
        self.rule
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Jacobi spectral radius estimate `(1/n) Σ cos(π/N_k)` of the box.
    pub fn jacobi_radius(&self) -> T {
        let d = &self.domain;
        let n = d.n();
        let mirrored = self.rule == FaceRule::CopyInward;
        let intervals = |k: usize| {
            let k = if mirrored { 2 * k } else { k };
            (T::PI() / T::from_count(k.max(1))).cos()
        };
        let mut s = intervals(d.height());
        for _ in 0..n - 1 {
            s = s + intervals(2 * d.lateral_halfwidth());
        }
        s / T::from_count(n)
    }

    fn omega(&self, r: Relaxation<T>) -> T {
        match r {
            Relaxation::GaussSeidel => T::one(),
            Relaxation::Sor(w) => w,
            Relaxation::OptimalSor => {
                let rho = self.jacobi_radius().min(T::one());
                T::lit(2.0) / (T::one() + (T::one() - rho * rho).max(T::zero()).sqrt())
            }
        }
    }

    /// Copies inward values onto the faces (no-op for fixed faces).
    pub fn refresh_faces(&self, v: &mut [T]) {
        for &(face, src) in &self.faces {
            v[face] = v[src];
        }
    }

    /// `max |Δ^ε u|` over interior sites (0 when there are none).
    pub fn residual(&self, v: &[T]) -> T {
        self.interior
            .par_iter()
            .with_min_len(1024)
            .map(|&o| self.stencil.laplacian_at(v, o).abs())
            .reduce(T::zero, T::max)
    }

    /// Relaxes interior values in place until the residual is below `opts.tol`.
    ///
    /// Boundary-plane values are data and are never touched.
    pub fn solve(&self, v: &mut [T], opts: &SolverOptions<T>) -> Result<SolveStats<T>> {
        opts.validate()?;
        if v.len() != self.domain.site_count() {
            return Err(invalid("values", "length does not match the plan's domain"));
        }
        let omega = self.omega(opts.relaxation);
        let inv_deg = T::from_count(self.stencil.bulk_neighbors()).recip();
        let mut buf: Vec<T> = Vec::new();
        self.refresh_faces(v);
        let mut sweeps = 0usize;
        loop {
            let residual = self.residual(v);
            if !residual.is_finite() {
                return Err(Error::NonConvergence {
                    sweeps,
                    residual: residual.as_f64(),
                });
            }
            if residual <= opts.tol {
                return Ok(SolveStats { sweeps, residual });
            }
            if sweeps >= opts.max_sweeps {
                return Err(Error::NonConvergence {
                    sweeps,
                    residual: residual.as_f64(),
                });
            }
            let batch = opts.check_every.min(opts.max_sweeps - sweeps);
            for _ in 0..batch {
                for color in &self.colors {
                    let snapshot: &[T] = v;
                    color
                        .par_iter()
                        .with_min_len(1024)
                        .map(|&o| {
                            let c = snapshot[o];
                            let avg = self.stencil.neighbor_sum(snapshot, o) * inv_deg;
                            if omega == T::one() {
                                avg
                            } else {
                                c + omega * (avg - c)
                            }
                        })
                        .collect_into_vec(&mut buf);
                    for (&o, &x) in color.iter().zip(&buf) {
                        v[o] = x;
                    }
                    self.refresh_faces(v);
                }
            }
            sweeps += batch;
        }
    }
}
