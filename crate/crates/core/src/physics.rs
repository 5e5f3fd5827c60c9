//! Potentials, boundary nonlinearities and dislocation-shaped initial data.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::harmonic::{continuous_extension, KernelQuadrature};
use crate::lattice::{BoundaryField, LatticeDomain, LatticeField};
use crate::scalar::Real;

/// 1-periodic, even misfit potential `W(a) = A (1 - cos 2πa)`.
///
/// Vanishes exactly on the integers and is positive elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPotential<T> {
    amplitude: T,
}

impl<T: Real> PeriodicPotential<T> {
    pub fn cosine(amplitude: T) -> Result<Self> {
        if !(amplitude > T::zero()) || !amplitude.is_finite() {
            return Err(invalid("amplitude", format!("must be positive, got {amplitude}")));
        }
        Ok(Self { amplitude })
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    fn angle(a: T) -> T {
        T::TAU() * a
    }

    pub fn value(&self, a: T) -> T {
        self.amplitude * (T::one() - Self::angle(a).cos())
    }

    pub fn derivative(&self, a: T) -> T {
        self.amplitude * T::TAU() * Self::angle(a).sin()
    }

    pub fn second_derivative(&self, a: T) -> T {
        self.amplitude * T::TAU() * T::TAU() * Self::angle(a).cos()
    }

    pub fn third_derivative(&self, a: T) -> T {
        -self.amplitude * T::TAU().powi(3) * Self::angle(a).sin()
    }

    /// `sup |W'|`, `sup |W''|`, `sup |W'''|`.
    pub fn derivative_bounds(&self) -> [T; 3] {
        let k = T::TAU();
        [self.amplitude * k, self.amplitude * k * k, self.amplitude * k.powi(3)]
    }
}

/// Certified sup norms of `F`, `F'` and `F''` over the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearityBounds<T> {
    pub sup: T,
    pub sup_prime: T,
    pub sup_second: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape<T> {
    Constant(T),
    /// `F(a) = -amplitude * sin(wavenumber * a)`.
    Sinusoidal {
        amplitude: T,
        wavenumber: T,
    },
    /// `F(a) = sigma - W'(2a + eps * sigma)`.
    Effective {
        potential: PeriodicPotential<T>,
        sigma: T,
        eps: T,
    },
}

/// Boundary forcing `F` together with analytic bounds on it and its first two
/// derivatives; the bounds feed the time-step and barrier constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nonlinearity<T> {
    shape: Shape<T>,
    bounds: NonlinearityBounds<T>,
}

impl<T: Real> Nonlinearity<T> {
    pub fn constant(c: T) -> Self {
        Self {
            shape: Shape::Constant(c),
            bounds: NonlinearityBounds {
                sup: c.abs(),
                sup_prime: T::zero(),
                sup_second: T::zero(),
            },
        }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// `F(a) = -amplitude * sin(wavenumber * a)`.
    pub fn sinusoidal(amplitude: T, wavenumber: T) -> Self {
        let (a, k) = (amplitude.abs(), wavenumber.abs());
        Self {
            shape: Shape::Sinusoidal { amplitude, wavenumber },
            bounds: NonlinearityBounds {
                sup: a,
                sup_prime: a * k,
                sup_second: a * k * k,
            },
        }
    }

    #[inline]
    pub fn eval(&self, a: T) -> T {
        match self.shape {
            Shape::Constant(c) => c,
            Shape::Sinusoidal { amplitude, wavenumber } => -amplitude * (wavenumber * a).sin(),
            Shape::Effective { potential, sigma, eps } => sigma - potential.derivative(T::lit(2.0) * a + eps * sigma),
        }
    }

    pub fn derivative(&self, a: T) -> T {
        match self.shape {
            Shape::Constant(_) => T::zero(),
            Shape::Sinusoidal { amplitude, wavenumber } => -amplitude * wavenumber * (wavenumber * a).cos(),
            Shape::Effective { potential, sigma, eps } => {
                -T::lit(2.0) * potential.second_derivative(T::lit(2.0) * a + eps * sigma)
            }
        }
    }

    pub fn second_derivative(&self, a: T) -> T {
        match self.shape {
            Shape::Constant(_) => T::zero(),
            Shape::Sinusoidal { amplitude, wavenumber } => amplitude * wavenumber * wavenumber * (wavenumber * a).sin(),
            Shape::Effective { potential, sigma, eps } => {
                -T::lit(4.0) * potential.third_derivative(T::lit(2.0) * a + eps * sigma)
            }
        }
    }

    pub fn bounds(&self) -> NonlinearityBounds<T> {
        self.bounds
    }

    /// True when `F` is identically zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape::Constant(c) if c == T::zero())
    }
}

/// `F^ε(a) = σ - W'(2a + εσ)`, the boundary forcing of a sheared crystal.
/// `eps = 0` gives the limit nonlinearity.
pub fn effective_nonlinearity<T: Real>(w: &PeriodicPotential<T>, sigma: T, eps: T) -> Nonlinearity<T> {
    let [d1, d2, d3] = w.derivative_bounds();
    Nonlinearity {
        shape: Shape::Effective {
            potential: *w,
            sigma,
            eps,
        },
        bounds: NonlinearityBounds {
            sup: sigma.abs() + d1,
            sup_prime: T::lit(2.0) * d2,
            sup_second: T::lit(4.0) * d3,
        },
    }
}

/// Orientation of a straight dislocation line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DislocationKind {
    /// Displacement varies along lateral axis 1.
    Screw,
    /// Displacement varies along lateral axis 2; needs `n >= 3`.
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ProfileShape<T> {
    Constant(T),
    /// `lower + (upper - lower) * (1/2 + atan(z_axis / width) / π)`.
    Arctan {
        axis: usize,
        width: T,
        lower: T,
        upper: T,
    },
}

/// Initial displacement `u_0` on the boundary plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryProfile<T> {
    n: usize,
    shape: ProfileShape<T>,
}

impl<T: Real> BoundaryProfile<T> {
    pub fn constant(n: usize, c: T) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be at least 1"));
        }
        Ok(Self {
            n,
            shape: ProfileShape::Constant(c),
        })
    }

    /// Monotone arctan step from `lower` (at `z_axis → -∞`) to `upper`
    /// (at `z_axis → +∞`) with core width `width`.
    pub fn arctan(n: usize, axis: usize, width: T, lower: T, upper: T) -> Result<Self> {
        if axis + 1 >= n {
            return Err(invalid(
                "axis",
                format!("lateral axis {} does not exist for n = {n}", axis + 1),
            ));
        }
        if !(width > T::zero()) || !width.is_finite() {
            return Err(invalid("width", "must be positive"));
        }
        Ok(Self {
            n,
            shape: ProfileShape::Arctan {
                axis,
                width,
                lower,
                upper,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Lateral axis the profile varies along, if any.
    pub fn axis(&self) -> Option<usize> {
        match self.shape {
            ProfileShape::Constant(_) => None,
            ProfileShape::Arctan { axis, .. } => Some(axis),
        }
    }

    pub fn width(&self) -> Option<T> {
        match self.shape {
            ProfileShape::Constant(_) => None,
            ProfileShape::Arctan { width, .. } => Some(width),
        }
    }

    /// `u_0(z')` for lateral coordinates `z'` (length `n - 1`).
    #[inline]
    pub fn value(&self, z: &[T]) -> T {
        match self.shape {
            ProfileShape::Constant(c) => c,
            ProfileShape::Arctan {
                axis,
                width,
                lower,
                upper,
            } => lower + (upper - lower) * (T::lit(0.5) + (z[axis] / width).atan() * T::FRAC_1_PI()),
        }
    }

    /// Limits `(at -∞, at +∞)` along the profile axis.
    pub fn far_field(&self) -> (T, T) {
        match self.shape {
            ProfileShape::Constant(c) => (c, c),
            ProfileShape::Arctan { lower, upper, .. } => (lower, upper),
        }
    }

    /// Limit of `u_0(x' + r d)` as `r → ∞` for a lateral direction `d`.
    pub fn asymptote(&self, direction: &[T]) -> T {
        match self.shape {
            ProfileShape::Constant(c) => c,
            ProfileShape::Arctan { axis, lower, upper, .. } => {
                let d = direction[axis];
                if d > T::zero() {
                    upper
                } else if d < T::zero() {
                    lower
                } else {
                    T::lit(0.5) * (lower + upper)
                }
            }
        }
    }

    /// Mean of the far-field limits over all lateral directions.
    pub fn mean_asymptote(&self) -> T {
        let (lo, hi) = self.far_field();
        T::lit(0.5) * (lo + hi)
    }

    pub fn inf_sup(&self) -> (T, T) {
        let (lo, hi) = self.far_field();
        (lo.min(hi), lo.max(hi))
    }

    pub fn sup_norm(&self) -> T {
        let (lo, hi) = self.far_field();
        lo.abs().max(hi.abs())
    }

    /// Analytic bounds on `|u_0'|`, `|u_0''|`, `|u_0'''|`.
    pub fn derivative_bounds(&self) -> [T; 3] {
        match self.shape {
            ProfileShape::Constant(_) => [T::zero(); 3],
            ProfileShape::Arctan {
                width, lower, upper, ..
            } => {
                let a = (upper - lower).abs() * T::FRAC_1_PI();
                // max |d^k/ds^k atan(s)| is 1, 3√3/8 and 2 for k = 1, 2, 3.
                [
                    a / width,
                    a * T::lit(3.0 * 3f64.sqrt() / 8.0) / (width * width),
                    a * T::lit(2.0) / width.powi(3),
                ]
            }
        }
    }

    /// Same profile moved up by `delta`.
    pub fn shifted(&self, delta: T) -> Self {
        let shape = match self.shape {
            ProfileShape::Constant(c) => ProfileShape::Constant(c + delta),
            ProfileShape::Arctan {
                axis,
                width,
                lower,
                upper,
            } => ProfileShape::Arctan {
                axis,
                width,
                lower: lower + delta,
                upper: upper + delta,
            },
        };
        Self { n: self.n, shape }
    }
}

/// Screw or edge dislocation: `u_0 = (1/2)(1/2 + atan(z_axis / width) / π)`,
/// rising from 0 to 1/2 across the core.
pub fn dislocation_profile<T: Real>(kind: DislocationKind, width: T, n: usize) -> Result<BoundaryProfile<T>> {
    let axis = match kind {
        DislocationKind::Screw => {
            if n < 2 {
                return Err(invalid("n", "a screw dislocation needs a lateral axis (n >= 2)"));
            }
            0
        }
        DislocationKind::Edge => {
            if n < 3 {
                return Err(invalid("n", "an edge dislocation needs lateral axis 2 (n >= 3)"));
            }
            1
        }
    };
    BoundaryProfile::arctan(n, axis, width, T::zero(), T::lit(0.5))
}

/// How the boundary forcing is chosen for a run at spacing `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Forcing<T> {
    Fixed(Nonlinearity<T>),
    /// `F^ε` for the run's spacing (or `F^0` when `eps_dependent` is false).
    Effective {
        potential: PeriodicPotential<T>,
        sigma: T,
        eps_dependent: bool,
    },
}

/// Forcing plus initial data: everything that defines a physical run apart
/// from the lattice and the time integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario<T> {
    pub forcing: Forcing<T>,
    pub profile: BoundaryProfile<T>,
}

impl<T: Real> Scenario<T> {
    pub fn new(forcing: Forcing<T>, profile: BoundaryProfile<T>) -> Self {
        Self { forcing, profile }
    }

    /// Screw dislocation in a cosine potential under applied stress `sigma`.
    pub fn screw(n: usize, amplitude: T, sigma: T, width: T) -> Result<Self> {
        Ok(Self {
            forcing: Forcing::Effective {
                potential: PeriodicPotential::cosine(amplitude)?,
                sigma,
                eps_dependent: true,
            },
            profile: dislocation_profile(DislocationKind::Screw, width, n)?,
        })
    }

    pub fn nonlinearity(&self, eps: T) -> Nonlinearity<T> {
        match self.forcing {
            Forcing::Fixed(f) => f,
            Forcing::Effective {
                potential,
                sigma,
                eps_dependent,
            } => effective_nonlinearity(&potential, sigma, if eps_dependent { eps } else { T::zero() }),
        }
    }

    pub fn with_profile(mut self, profile: BoundaryProfile<T>) -> Self {
        self.profile = profile;
        self
    }
}

/// Initial data as the lattice model consumes it.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData<T> {
    /// `β > 0`: data on every site.
    Full(LatticeField<T>),
    /// `β = 0`: data on the boundary plane only.
    Boundary(BoundaryField<T>),
}

/// Samples `u_0` on the lattice. For `β > 0` the bulk receives the Poisson
/// extension `u_0^c`; for `β = 0` only the boundary trace is produced.
pub fn extend_initial_data<T: Real>(
    profile: &BoundaryProfile<T>,
    domain: &LatticeDomain<T>,
    beta: T,
    quadrature: &KernelQuadrature<T>,
) -> Result<InitialData<T>> {
    if profile.n() != domain.n() {
        return Err(invalid("profile", "profile and lattice dimensions differ"));
    }
    if !(beta >= T::zero()) {
        return Err(invalid("beta", "must be nonnegative"));
    }
    if beta == T::zero() {
        return Ok(InitialData::Boundary(BoundaryField::from_fn(domain.clone(), |z| {
            profile.value(z)
        })));
    }
    let values = sample_extension(
        profile,
        domain,
        quadrature,
        &(0..domain.site_count()).collect::<Vec<_>>(),
    )?;
    Ok(InitialData::Full(LatticeField::from_values(
        domain.clone(),
        values,
        T::zero(),
    )?))
}

/// `u_0^c` at the listed sites (`u_0` itself on the boundary plane).
pub fn sample_extension<T: Real>(
    profile: &BoundaryProfile<T>,
    domain: &LatticeDomain<T>,
    quadrature: &KernelQuadrature<T>,
    sites: &[usize],
) -> Result<Vec<T>> {
    let n = domain.n();
    sites
        .par_iter()
        .with_min_len(64)
        .map(|&o| {
            let x = domain.position(o);
            if domain.layer(o) == 0 {
                return Ok(profile.value(&x[..n - 1]));
            }
            let ext = continuous_extension(profile, &x, quadrature)?;
            if ext.flagged {
                return Err(crate::error::Error::QuadratureTolerance {
                    point: x.iter().map(|v| v.as_f64()).collect(),
                    estimate: ext.error_estimate.as_f64(),
                    tolerance: quadrature.tolerance.as_f64(),
                });
            }
            Ok(ext.value)
        })
        .collect()
}

/// `1/(2π)`, handy for the `F(u) = -sin(2πu)/(2π)` test nonlinearity.
pub const INV_TWO_PI: f64 = 0.5 / PI;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const AMP: f64 = 1.0 / (4.0 * PI * PI);

    #[test]
    fn cosine_potential_values() {
        let w = PeriodicPotential::cosine(0.7).unwrap();
        assert_eq!(w.value(0.0), 0.0);
        assert_abs_diff_eq!(w.value(1.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value(0.5), 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value(0.25), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w.derivative(0.25), 2.0 * PI * 0.7, epsilon = 1e-14);
        assert!(PeriodicPotential::cosine(-1.0).is_err());
        assert!(PeriodicPotential::cosine(0.0).is_err());
    }

    #[test]
    fn potential_invariants_on_samples() {
        let w = PeriodicPotential::cosine(0.3).unwrap();
        for k in 0..400 {
            let a = -5.0 + 0.0273 * k as f64;
            assert!((w.value(a + 1.0) - w.value(a)).abs() <= 1e-12);
            assert!((w.value(-a) - w.value(a)).abs() <= 1e-12);
            if (a - a.round()).abs() > 1e-6 {
                assert!(w.value(a) > 0.0);
            }
        }
        for k in -5..=5 {
            assert!(w.value(k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_nonlinearity_examples() {
        let w = PeriodicPotential::cosine(AMP).unwrap();
        assert_eq!(effective_nonlinearity(&w, 0.0, 0.0).eval(0.0), 0.0);
        assert_eq!(effective_nonlinearity(&w, 0.1, 0.0).eval(0.0), 0.1);
        // Direct formula oracle: 0.1 - A·2π·sin(2π·0.45) with A = 1/(4π²).
        let oracle = 0.1 - (2.0 * PI * 0.45).sin() / (2.0 * PI);
        assert_abs_diff_eq!(oracle, 0.050_818_417_845_826_69, epsilon = 1e-15);
        assert_abs_diff_eq!(effective_nonlinearity(&w, 0.1, 0.5).eval(0.2), oracle, epsilon = 1e-15);
        let f = effective_nonlinearity(&w, 0.0, 0.0);
        assert_abs_diff_eq!(f.eval(0.1), -(0.4 * PI).sin() / (2.0 * PI), epsilon = 1e-15);
        let b = f.bounds();
        assert_abs_diff_eq!(b.sup, 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(b.sup_prime, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.sup_second, 8.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn certified_bounds_dominate_sampling() {
        let w = PeriodicPotential::cosine(0.05).unwrap();
        let cases = [
            effective_nonlinearity(&w, 0.3, 0.1),
            effective_nonlinearity(&w, -0.2, 0.0),
            Nonlinearity::sinusoidal(INV_TWO_PI, 2.0 * PI),
            Nonlinearity::constant(-1.5),
        ];
        for f in cases {
            let b = f.bounds();
            let (mut m0, mut m1, mut m2) = (0.0f64, 0.0f64, 0.0f64);
            for k in 0..=200_000 {
                let a = -10.0 + 1e-4 * k as f64;
                m0 = m0.max(f.eval(a).abs());
                m1 = m1.max(f.derivative(a).abs());
                m2 = m2.max(f.second_derivative(a).abs());
            }
            assert!(m0 <= b.sup * (1.0 + 1e-12));
            assert!(m1 <= b.sup_prime * (1.0 + 1e-12));
            assert!(m2 <= b.sup_second * (1.0 + 1e-12));
            // and they are attained to sampling accuracy
            assert!(m0 >= 0.999 * b.sup);
        }
    }

    #[test]
    fn effective_family_converges_with_lipschitz_rate() {
        let w = PeriodicPotential::cosine(AMP).unwrap();
        let sigma = 0.4;
        let limit = effective_nonlinearity(&w, sigma, 0.0);
        let sup_w2 = w.derivative_bounds()[1];
        let mut last = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1, 0.05, 0.025] {
            let f = effective_nonlinearity(&w, sigma, eps);
            let gap = (0..=4000)
                .map(|k| -2.0 + 1e-3 * k as f64)
                .map(|a| (f.eval(a) - limit.eval(a)).abs())
                .fold(0.0, f64::max);
            assert!(gap <= sup_w2 * sigma * eps * (1.0 + 1e-12));
            assert!(gap < last);
            last = gap;
        }
    }

    #[test]
    fn screw_profile_values() {
        let p = dislocation_profile(DislocationKind::Screw, 1.0, 2).unwrap();
        assert_eq!(p.value(&[0.0]), 0.25);
        assert_abs_diff_eq!(p.value(&[1.0]), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(p.value(&[1e12]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.value(&[-1e12]), 0.0, epsilon = 1e-12);
        assert_eq!(p.far_field(), (0.0, 0.5));
    }

    #[test]
    fn profile_is_monotone_with_range_in_open_interval() {
        for width in [0.3, 1.0, 4.0] {
            let p = dislocation_profile(DislocationKind::Screw, width, 2).unwrap();
            let mut last = -1.0;
            for k in 0..=2000 {
                let z = -1e6 * width + (2e6 * width) * (k as f64 / 2000.0).powi(3);
                let v = p.value(&[z]);
                assert!(v >= last);
                assert!(v > 0.0 && v < 0.5);
                last = v;
            }
        }
    }

    #[test]
    fn edge_profile_varies_along_second_axis() {
        assert!(dislocation_profile::<f64>(DislocationKind::Edge, 1.0, 2).is_err());
        assert!(dislocation_profile::<f64>(DislocationKind::Screw, 1.0, 1).is_err());
        assert!(dislocation_profile::<f64>(DislocationKind::Screw, 0.0, 2).is_err());
        let p = dislocation_profile(DislocationKind::Edge, 2.0, 3).unwrap();
        assert_eq!(p.value(&[5.0, 0.0]), 0.25);
        assert_eq!(p.value(&[-3.0, 2.0]), p.value(&[7.0, 2.0]));
        assert_abs_diff_eq!(p.value(&[0.0, 2.0]), 0.375, epsilon = 1e-15);
    }

    #[test]
    fn derivative_bounds_dominate_finite_differences() {
        let p = BoundaryProfile::arctan(2, 0, 0.7, -0.2, 0.9).unwrap();
        let [b1, b2, b3] = p.derivative_bounds();
        let h = 1e-3;
        let f = |z: f64| p.value(&[z]);
        for k in 0..4000 {
            let z = -5.0 + 0.0025 * k as f64;
            assert!(((f(z + h) - f(z - h)) / (2.0 * h)).abs() <= b1 * 1.001);
            assert!(((f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h)).abs() <= b2 * 1.001);
            let d3 = (f(z + 2.0 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2.0 * h)) / (2.0 * h * h * h);
            assert!(d3.abs() <= b3 * 1.01);
        }
    }

    #[test]
    fn initial_data_shapes() {
        let q = KernelQuadrature::<f64>::default();
        let d = LatticeDomain::<f64>::new(2, 0.5, 4, 4).unwrap();
        let c = BoundaryProfile::constant(2, 0.3).unwrap();
        match extend_initial_data(&c, &d, 1.0, &q).unwrap() {
            InitialData::Full(f) => assert!(f.values().iter().all(|v| (v - 0.3).abs() < 1e-12)),
            other => panic!("{other:?}"),
        }
        let p = dislocation_profile(DislocationKind::Screw, 1.0, 2).unwrap();
        match extend_initial_data(&p, &d, 0.0, &q).unwrap() {
            InitialData::Boundary(g) => {
                assert_eq!(g.values().len(), 9);
                assert_eq!(g.values()[4], 0.25);
                assert_abs_diff_eq!(g.values()[6], p.value(&[1.0]), epsilon = 0.0);
            }
            other => panic!("{other:?}"),
        }
        match extend_initial_data(&p, &d, 1.0, &q).unwrap() {
            InitialData::Full(f) => {
                // closed-form oracle for the Poisson extension of an arctan step
                let oracle = 0.5 * (0.5 + (0.0f64 / 1.5).atan() / PI);
                assert_abs_diff_eq!(f.get(&[0, 1]).unwrap(), oracle, epsilon = 1e-8);
                let oracle = 0.5 * (0.5 + (1.0f64 / 2.0).atan() / PI);
                assert_abs_diff_eq!(f.get(&[2, 2]).unwrap(), oracle, epsilon = 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }
}
