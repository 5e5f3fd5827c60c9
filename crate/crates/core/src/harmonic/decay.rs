//! Measured decay of `u_0^c` and of the lattice operators applied to it.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::harmonic::{continuous_extension, KernelQuadrature};
use crate::lattice::io::fmt_sig17;
use crate::physics::BoundaryProfile;
use crate::scalar::Real;

/// Where the derivatives are sampled: lateral positions along axis 0 (other
/// lateral coordinates zero) and the lattice spacing of the `ε` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySampling<T> {
    pub lateral: Vec<T>,
    pub eps: T,
}

impl<T: Real> DecaySampling<T> {
    /// Symmetric points out to four profile widths.
    pub fn around(width: T, eps: T) -> Self {
        let lateral = [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&s| T::lit(s) * width)
            .collect();
        Self { lateral, eps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRow<T> {
    pub height: T,
    /// `max |D u_0^c| (1 + x_n)`.
    pub grad_product: T,
    /// `max |D² u_0^c| (1 + x_n²)`, Frobenius norm of the Hessian.
    pub hess_product: T,
    /// `max |D^ε[u_0^c]| (1 + x_n)`.
    pub d_eps_product: T,
    /// `max |Δ^ε[u_0^c]| (1 + x_n²)`.
    pub lap_eps_product: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionReport<T> {
    pub eps: T,
    pub rows: Vec<DecayRow<T>>,
    /// Smallest `C` bounding both continuous products at every height.
    pub constant: T,
    /// Smallest `C_1` bounding both lattice products at every height.
    pub lattice_constant: T,
    /// Columns whose products still grow between the two largest heights.
    pub growth: Vec<&'static str>,
}

pub const DECAY_CSV_HEADER: &str = "height,grad_product,hess_product,d_eps_product,lap_eps_product";

impl<T: Real> ExtensionReport<T> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(DECAY_CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_sig17(r.height.as_f64()),
                fmt_sig17(r.grad_product.as_f64()),
                fmt_sig17(r.hess_product.as_f64()),
                fmt_sig17(r.d_eps_product.as_f64()),
                fmt_sig17(r.lap_eps_product.as_f64())
            );
        }
        s
    }
}

/// Samples the decay products at each height. Heights must be at least `ε`
/// so the lattice Laplacian stays above the boundary plane.
pub fn decay_report<T: Real>(
    u0: &BoundaryProfile<T>,
    heights: &[T],
    q: &KernelQuadrature<T>,
    sampling: &DecaySampling<T>,
) -> Result<ExtensionReport<T>> {
    let n = u0.n();
    if n < 2 {
        return Err(invalid("profile", "decay products need at least one lateral axis"));
    }
    if heights.is_empty() || sampling.lateral.is_empty() {
        return Err(invalid("heights", "need at least one height and one lateral point"));
    }
    if !(sampling.eps > T::zero()) {
        return Err(invalid("eps", "must be positive"));
    }
    if let Some(h) = heights.iter().find(|&&h| !(h >= sampling.eps)) {
        return Err(invalid("heights", format!("height {h} is below eps {}", sampling.eps)));
    }
    let rows = heights
        .par_iter()
        .map(|&h| row_at(u0, h, q, sampling))
        .collect::<Result<Vec<_>>>()?;
    let constant = rows
        .iter()
        .fold(T::zero(), |c, r| c.max(r.grad_product).max(r.hess_product));
    let lattice_constant = rows
        .iter()
        .fold(T::zero(), |c, r| c.max(r.d_eps_product).max(r.lap_eps_product));
    let mut growth = Vec::new();
    type Column<T> = (&'static str, fn(&DecayRow<T>) -> T);
    let columns: [Column<T>; 4] = [
        ("grad_product", |r| r.grad_product),
        ("hess_product", |r| r.hess_product),
        ("d_eps_product", |r| r.d_eps_product),
        ("lap_eps_product", |r| r.lap_eps_product),
    ];
    for (name, get) in columns {
        if grows(&rows, get) {
            growth.push(name);
        }
    }
    Ok(ExtensionReport {
        eps: sampling.eps,
        rows,
        constant,
        lattice_constant,
        growth,
    })
}

/// Log-log slope between the two largest heights above 1/2: a bounded
/// product flattens out, a product that keeps growing does not.
fn grows<T: Real>(rows: &[DecayRow<T>], get: fn(&DecayRow<T>) -> T) -> bool {
    let mut sorted: Vec<_> = rows.iter().map(|r| (r.height, get(r))).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite heights"));
    let [.., (h0, p0), (h1, p1)] = sorted[..] else {
        return false;
    };
    if p1 <= T::zero() || h1 <= h0 {
        return false;
    }
    if p0 <= T::zero() {
        return true;
    }
    (p1 / p0).ln() / (h1 / h0).ln() > T::lit(0.5)
}

fn row_at<T: Real>(
    u0: &BoundaryProfile<T>,
    h: T,
    q: &KernelQuadrature<T>,
    s: &DecaySampling<T>,
) -> Result<DecayRow<T>> {
    let n = u0.n();
    let eval = |x: &[T]| -> Result<T> {
        if x[n - 1] <= T::zero() {
            return Ok(u0.value(&x[..n - 1]));
        }
        Ok(continuous_extension(u0, x, q)?.value)
    };
    let step = h / T::lit(100.0);
    let eps = s.eps;
    let one = T::one();
    let two = T::lit(2.0);
    let mut best = [T::zero(); 4];
    for &x1 in &s.lateral {
        let mut x = vec![T::zero(); n];
        x[0] = x1;
        x[n - 1] = h;
        let center = eval(&x)?;
        let shifted = |x: &[T], k: usize, d: T| {
            let mut y = x.to_vec();
            y[k] = y[k] + d;
            y
        };
        let mut grad2 = T::zero();
        let mut hess2 = T::zero();
        for k in 0..n {
            let p = eval(&shifted(&x, k, step))?;
            let m = eval(&shifted(&x, k, -step))?;
            let g = (p - m) / (two * step);
            grad2 = grad2 + g * g;
            let dkk = (p - two * center + m) / (step * step);
            hess2 = hess2 + dkk * dkk;
            for l in k + 1..n {
                let pp = eval(&shifted(&shifted(&x, k, step), l, step))?;
                let pm = eval(&shifted(&shifted(&x, k, step), l, -step))?;
                let mp = eval(&shifted(&shifted(&x, k, -step), l, step))?;
                let mm = eval(&shifted(&shifted(&x, k, -step), l, -step))?;
                let dkl = (pp - pm - mp + mm) / (T::lit(4.0) * step * step);
                hess2 = hess2 + two * dkl * dkl;
            }
        }
        // Lattice operators with spacing eps centred at x.
        let mut d_eps = eval(&shifted(&x, n - 1, eps))? - center;
        let mut lap = d_eps + eval(&shifted(&x, n - 1, -eps))? - center;
        for k in 0..n - 1 {
            let p = eval(&shifted(&x, k, eps))? - center;
            let m = eval(&shifted(&x, k, -eps))? - center;
            d_eps = d_eps + p + m;
            lap = lap + p + m;
        }
        let d_eps = (d_eps / eps).abs();
        let lap = (lap / (eps * eps)).abs();
        best[0] = best[0].max(grad2.sqrt() * (one + h));
        best[1] = best[1].max(hess2.sqrt() * (one + h * h));
        best[2] = best[2].max(d_eps * (one + h));
        best[3] = best[3].max(lap * (one + h * h));
    }
    Ok(DecayRow {
        height: h,
        grad_product: best[0],
        hess_product: best[1],
        d_eps_product: best[2],
        lap_eps_product: best[3],
    })
}
