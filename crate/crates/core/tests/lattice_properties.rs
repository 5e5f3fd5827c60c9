use fkpn_core::lattice::{discrete_boundary_operator, discrete_laplacian, restrict, LatticeDomain, LatticeField};
use proptest::prelude::*;

fn interior(d: &LatticeDomain<f64>) -> Vec<Vec<i64>> {
    d.interior_sites().into_iter().map(|o| d.index(o)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_is_linear(
        n in 1usize..=3,
        alpha in -10.0f64..10.0,
        seed in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let d = LatticeDomain::<f64>::new(n, 0.5, 2, 3).unwrap();
        let f = LatticeField::from_fn(d.clone(), |x| x.iter().enumerate().map(|(k, v)| (seed[k] * v).sin()).sum());
        let g = LatticeField::from_fn(d.clone(), |x| x.iter().enumerate().map(|(k, v)| seed[k + 3] * v * v).sum::<f64>() + seed[7]);
        let combo = LatticeField::from_values(
            d.clone(),
            f.values().iter().zip(g.values()).map(|(a, b)| alpha * a + b).collect(),
            0.0,
        ).unwrap();
        for idx in interior(&d) {
            let lhs = discrete_laplacian(&combo, &idx).unwrap();
            let rhs = alpha * discrete_laplacian(&f, &idx).unwrap() + discrete_laplacian(&g, &idx).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())) * 100.0);
        }
    }

    #[test]
    fn laplacian_exact_on_quadratics(
        n in 1usize..=3,
        k in 0u32..3,
        a in proptest::collection::vec(-2.0f64..2.0, 3),
        b in proptest::collection::vec(-2.0f64..2.0, 3),
        c in -2.0f64..2.0,
        cross in -2.0f64..2.0,
    ) {
        let eps = 0.5f64.powi(k as i32);
        let d = LatticeDomain::<f64>::new(n, eps, 2, 3).unwrap();
        let f = LatticeField::from_fn(d.clone(), |x| {
            let mut s = c;
            for i in 0..n {
                s += a[i] * x[i] * x[i] + b[i] * x[i];
            }
            if n > 1 {
                s += cross * x[0] * x[n - 1];
            }
            s
        });
        let exact: f64 = 2.0 * a[..n].iter().sum::<f64>();
        for idx in interior(&d) {
            prop_assert!((discrete_laplacian(&f, &idx).unwrap() - exact).abs() <= 1e-12 * (1.0 / (eps * eps)));
        }
    }

    #[test]
    fn laplacian_respects_lateral_symmetries(seed in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let d = LatticeDomain::<f64>::new(3, 0.5, 3, 3).unwrap();
        let g = |x: f64, y: f64, z: f64| (seed[0] * x + seed[1] * y * y).sin() + seed[2] * x * y * z + (seed[3] * z + seed[4] * x).cos();
        let f = LatticeField::from_fn(d.clone(), |p| g(p[0], p[1], p[2]));
        let swapped = LatticeField::from_fn(d.clone(), |p| g(p[1], p[0], p[2]));
        let reflected = LatticeField::from_fn(d.clone(), |p| g(-p[0], p[1], p[2]));
        for idx in interior(&d) {
            let v = discrete_laplacian(&f, &idx).unwrap();
            let s = discrete_laplacian(&swapped, &[idx[1], idx[0], idx[2]]).unwrap();
            let r = discrete_laplacian(&reflected, &[-idx[0], idx[1], idx[2]]).unwrap();
            prop_assert!((v - s).abs() <= 1e-12 * (1.0 + v.abs()) * 10.0);
            prop_assert!((v - r).abs() <= 1e-12 * (1.0 + v.abs()) * 10.0);
        }
    }

    #[test]
    fn restriction_reproduces_coarse_sampling(n in 1usize..=3, m in 1u32..=2, w in 0.1f64..3.0) {
        let coarse_eps = 0.5;
        let fine_eps = coarse_eps / 2f64.powi(m as i32);
        let lat = if n == 1 { 0.0 } else { 1.0 };
        let fine = LatticeDomain::<f64>::from_extents(n, fine_eps, lat, 1.5).unwrap();
        let coarse = LatticeDomain::<f64>::from_extents(n, coarse_eps, lat, 1.5).unwrap();
        let smooth = |x: &[f64]| x.iter().map(|v| (w * v).sin()).sum::<f64>();
        let restricted = restrict(&LatticeField::from_fn(fine, smooth), &coarse).unwrap();
        let sampled = LatticeField::from_fn(coarse, smooth);
        prop_assert_eq!(restricted.values(), sampled.values());
    }
}

#[test]
fn boundary_operator_is_first_order_exact() {
    for n in 1..=3 {
        for eps in [1.0, 0.5, 0.25] {
            let d = LatticeDomain::<f64>::new(n, eps, 2, 2).unwrap();
            let f = LatticeField::from_fn(d.clone(), |x| 3.0 * x[n - 1] + x[..n - 1].iter().sum::<f64>() - 1.0);
            for o in d.active_boundary_sites() {
                let v = discrete_boundary_operator(&f, &d.index(o)).unwrap();
                assert!((v - 3.0).abs() <= 1e-12, "n={n} eps={eps}: {v}");
            }
        }
    }
}
