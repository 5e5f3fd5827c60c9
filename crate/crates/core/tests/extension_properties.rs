use fkpn_core::harmonic::{
    continuous_extension, discrete_extension, kernel_mass, KernelQuadrature, SolverOptions, TruncationClosure,
};
use fkpn_core::lattice::{discrete_laplacian, BoundaryField, LatticeDomain, LatticeField};
use fkpn_core::physics::{dislocation_profile, sample_extension, BoundaryProfile, DislocationKind};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_has_unit_mass(n in 2usize..=3, xn in 0.05f64..20.0) {
        let est = kernel_mass(n, xn, &KernelQuadrature::default()).unwrap();
        prop_assert!((est.value - 1.0).abs() <= 1e-6);
        prop_assert!((est.value - 1.0).abs() <= est.error.max(1e-12) * 10.0 + 1e-9);
    }

    #[test]
    fn discrete_extension_stays_in_data_range(
        n in 2usize..=3,
        data in proptest::collection::vec(-5.0f64..5.0, 64),
        zero_normal in any::<bool>(),
    ) {
        let d = LatticeDomain::<f64>::new(n, 0.5, 2, 3).unwrap();
        let mut k = 0;
        let mut next = || { k += 1; data[k % data.len()] };
        let g = BoundaryField::from_fn(d.clone(), |_| next());
        let (mut lo, mut hi) = g.min_max();
        let closure = if zero_normal {
            TruncationClosure::ZeroNormalDifference
        } else {
            let faces = LatticeField::from_fn(d.clone(), |_| next());
            for o in d.face_sites().into_iter().filter(|&o| d.layer(o) > 0) {
                lo = lo.min(faces.values()[o]);
                hi = hi.max(faces.values()[o]);
            }
            TruncationClosure::Dirichlet(faces)
        };
        let u = discrete_extension(&g, &closure, &SolverOptions::with_tol(1e-11)).unwrap();
        for &v in u.values() {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn continuous_extension_is_bounded(
        n in 2usize..=3,
        width in 0.2f64..3.0,
        lower in -2.0f64..2.0,
        jump in -2.0f64..2.0,
        xp in proptest::collection::vec(-6.0f64..6.0, 2),
        xn in 0.05f64..6.0,
    ) {
        let q = KernelQuadrature::default();
        let p = BoundaryProfile::arctan(n, 0, width, lower, lower + jump).unwrap();
        let mut x = xp[..n - 1].to_vec();
        x.push(xn);
        let v = continuous_extension(&p, &x, &q).unwrap();
        let (a, b) = p.inf_sup();
        prop_assert!(v.value >= a - q.tolerance && v.value <= b + q.tolerance);
        prop_assert!(v.value.abs() <= p.sup_norm() + q.tolerance);
    }
}

/// Max of `|Δ^ε u_0^c|` over interior sites of the region `|x'| ≤ 1`,
/// `1 ≤ x_n ≤ 2` where everything is smooth.
fn harmonic_defect(eps: f64) -> f64 {
    let p = dislocation_profile(DislocationKind::Screw, 1.0, 2).unwrap();
    let d = LatticeDomain::<f64>::from_extents(2, eps, 1.5, 2.5).unwrap();
    let sites: Vec<usize> = (0..d.site_count()).collect();
    let q = KernelQuadrature::with_tolerance(1e-13);
    let u = LatticeField::from_values(d.clone(), sample_extension(&p, &d, &q, &sites).unwrap(), 0.0).unwrap();
    d.interior_sites()
        .into_iter()
        .filter(|&o| {
            let x = d.position(o);
            x[0].abs() <= 1.0 + 1e-9 && x[1] >= 1.0 - 1e-9 && x[1] <= 2.0 + 1e-9
        })
        .map(|o| discrete_laplacian(&u, &d.index(o)).unwrap().abs())
        .fold(0.0, f64::max)
}

#[test]
fn kernel_extension_is_discretely_harmonic_to_second_order() {
    let coarse = harmonic_defect(0.25);
    let fine = harmonic_defect(0.125);
    let ratio = coarse / fine;
    assert!(
        (3.0..5.0).contains(&ratio),
        "defects {coarse:e} -> {fine:e}, ratio {ratio}"
    );
}
