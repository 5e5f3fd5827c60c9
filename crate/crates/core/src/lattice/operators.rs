//! The nearest-neighbour operators of the lattice model.
//!
//! `Δ^ε[u](x) = ε⁻² Σ_{|y|=1} (u(x+εy) − u(x))` on bulk sites and
//! `D^ε[u](x) = ε⁻¹ Σ_{|y|=1, y_n ≥ 0} (u(x+εy) − u(x))` on the boundary plane.
//! The checked entry points take integer site indices; the `*_at` kernels
//! take precomputed strides and are used by the solvers.

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeField};
use crate::scalar::Real;

/// Neighbour strides of a domain, computed once per sweep.
#[derive(Clone, Debug)]
pub struct Stencil<T> {
    lateral: Vec<usize>,
    vertical: usize,
    inv_eps: T,
    inv_eps2: T,
}

impl<T: Real> Stencil<T> {
    pub fn new(domain: &LatticeDomain<T>) -> Self {
        let inv_eps = domain.eps().recip();
        Self {
            lateral: domain.lateral_strides(),
            vertical: domain.plane_len(),
            inv_eps,
            inv_eps2: inv_eps * inv_eps,
        }
    }

    /// Number of bulk neighbours, `2n`.
    #[inline]
    pub fn bulk_neighbors(&self) -> usize {
        2 * (self.lateral.len() + 1)
    }

    /// Number of boundary neighbours, `2n - 1`.
    #[inline]
    pub fn boundary_neighbors(&self) -> usize {
        2 * self.lateral.len() + 1
    }

    #[inline]
    pub fn inv_eps(&self) -> T {
        self.inv_eps
    }

    #[inline]
    pub fn inv_eps2(&self) -> T {
        self.inv_eps2
    }

    /// Sum of the `2n` neighbour values of an interior site.
    #[inline]
    pub fn neighbor_sum(&self, v: &[T], o: usize) -> T {
        let mut s = v[o + self.vertical] + v[o - self.vertical];
        for &st in &self.lateral {
            s = s + v[o + st] + v[o - st];
        }
        s
    }

    /// `Δ^ε` at an interior offset; the caller guarantees the stencil fits.
    #[inline]
    pub fn laplacian_at(&self, v: &[T], o: usize) -> T {
        let c = v[o];
        let mut s = (v[o + self.vertical] - c) + (v[o - self.vertical] - c);
        for &st in &self.lateral {
            s = s + (v[o + st] - c) + (v[o - st] - c);
        }
        s * self.inv_eps2
    }

    /// `D^ε` at an active boundary offset; the caller guarantees the stencil fits.
    #[inline]
    pub fn boundary_at(&self, v: &[T], o: usize) -> T {
        let c = v[o];
        let mut s = v[o + self.vertical] - c;
        for &st in &self.lateral {
            s = s + (v[o + st] - c) + (v[o - st] - c);
        }
        s * self.inv_eps
    }
}

/// `Δ^ε[f]` at the bulk site with integer index `index`.
pub fn discrete_laplacian<T: Real>(f: &LatticeField<T>, index: &[i64]) -> Result<T> {
    let d = f.domain();
    let o = d
        .offset(index)
        .ok_or_else(|| Error::ContractViolation(format!("site {index:?} is outside the lattice")))?;
    if !d.is_interior(o) {
        return Err(Error::ContractViolation(format!(
            "Δ^ε needs a bulk site with all 2n neighbours, got {index:?}"
        )));
    }
    Ok(Stencil::new(d).laplacian_at(f.values(), o))
}

/// `D^ε[f]` at the boundary-plane site with integer index `index`.
pub fn discrete_boundary_operator<T: Real>(f: &LatticeField<T>, index: &[i64]) -> Result<T> {
    let d = f.domain();
    let o = d
        .offset(index)
        .ok_or_else(|| Error::ContractViolation(format!("site {index:?} is outside the lattice")))?;
    if !d.is_active_boundary(o) {
        return Err(Error::ContractViolation(format!(
            "D^ε needs a boundary-plane site with its lateral and upward neighbours, got {index:?}"
        )));
    }
    Ok(Stencil::new(d).boundary_at(f.values(), o))
}
