//! Discrete harmonic extension: `Δ^ε u = 0` on interior sites with `u = g`
//! on the boundary plane and a closure rule on the truncation faces.

use crate::error::{invalid, Result};
use crate::harmonic::solver::{EllipticPlan, FaceRule, SolveStats, SolverOptions};
use crate::harmonic::KernelQuadrature;
use crate::lattice::{min_max, BoundaryField, LatticeDomain, LatticeField};
use crate::physics::{sample_extension, BoundaryProfile};
use crate::scalar::Real;

/// Values of the solution on truncation faces above the boundary plane.
#[derive(Clone, Debug, PartialEq)]
pub enum TruncationClosure<T> {
    /// Faces take the values of this field; other sites of it are ignored.
    Dirichlet(LatticeField<T>),
    /// Faces copy their nearest non-face site.
    ZeroNormalDifference,
}

impl<T: Real> TruncationClosure<T> {
    /// Dirichlet closure with `u_0^c` sampled on the faces.
    pub fn from_kernel(
        profile: &BoundaryProfile<T>,
        domain: &LatticeDomain<T>,
        q: &KernelQuadrature<T>,
    ) -> Result<Self> {
        let faces: Vec<usize> = domain
            .face_sites()
            .into_iter()
            .filter(|&o| domain.layer(o) > 0)
            .collect();
        let samples = sample_extension(profile, domain, q, &faces)?;
        let mut values = vec![T::zero(); domain.site_count()];
        for (&o, &s) in faces.iter().zip(&samples) {
            values[o] = s;
        }
        Ok(Self::Dirichlet(LatticeField::from_values(
            domain.clone(),
            values,
            T::zero(),
        )?))
    }

    pub fn face_rule(&self) -> FaceRule {
        match self {
            Self::Dirichlet(_) => FaceRule::Fixed,
            Self::ZeroNormalDifference => FaceRule::CopyInward,
        }
    }

    /// Writes the Dirichlet face values into `v` (nothing for the copy rule).
    pub fn apply(&self, domain: &LatticeDomain<T>, v: &mut [T]) -> Result<()> {
        if let Self::Dirichlet(data) = self {
            if !data.domain().same_lattice(domain) {
                return Err(invalid("closure", "Dirichlet data lives on a different lattice"));
            }
            for o in domain.face_sites() {
                if domain.layer(o) > 0 {
                    v[o] = data.values()[o];
                }
            }
        }
        Ok(())
    }

    /// Range of the closure data on the faces, if any.
    pub fn face_range(&self) -> Option<(T, T)> {
        match self {
            Self::Dirichlet(data) => {
                let d = data.domain();
                let faces: Vec<T> = d
                    .face_sites()
                    .into_iter()
                    .filter(|&o| d.layer(o) > 0)
                    .map(|o| data.values()[o])
                    .collect();
                (!faces.is_empty()).then(|| min_max(&faces))
            }
            Self::ZeroNormalDifference => None,
        }
    }
}

/// Harmonic extension of `g` into the bulk of its lattice.
pub fn discrete_extension<T: Real>(
    g: &BoundaryField<T>,
    closure: &TruncationClosure<T>,
    opts: &SolverOptions<T>,
) -> Result<LatticeField<T>> {
    discrete_extension_with_stats(g, closure, opts).map(|(f, _)| f)
}

/// As [`discrete_extension`], also returning the solver statistics.
pub fn discrete_extension_with_stats<T: Real>(
    g: &BoundaryField<T>,
    closure: &TruncationClosure<T>,
    opts: &SolverOptions<T>,
) -> Result<(LatticeField<T>, SolveStats<T>)> {
    let domain = g.domain();
    let (mut lo, mut hi) = g.min_max();
    if let Some((a, b)) = closure.face_range() {
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mid = lo + (hi - lo) * T::lit(0.5);
    let mut values = vec![mid; domain.site_count()];
    values[..domain.plane_len()].copy_from_slice(g.values());
    closure.apply(domain, &mut values)?;
    let plan = EllipticPlan::new(domain, closure.face_rule());
    let stats = plan.solve(&mut values, opts)?;
    Ok((LatticeField::from_values(domain.clone(), values, g.time())?, stats))
}
