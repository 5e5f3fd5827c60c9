use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeField};
use crate::scalar::Real;

/// Refinement exponent `m` with `coarse.eps = 2^m * fine.eps`, if the two
/// spacings are nested.
pub fn nesting_level<T: Real>(fine: T, coarse: T) -> Option<u32> {
    let ratio = (coarse / fine).as_f64();
    if !(ratio >= 1.0) || !ratio.is_finite() {
        return None;
    }
    let m = ratio.log2().round();
    if m > 62.0 {
        return None;
    }
    let exact = 2f64.powi(m as i32);
    ((ratio - exact).abs() <= 1e-9 * exact).then_some(m as u32)
}

/// Injects a fine-lattice field onto a nested coarse lattice: each coarse site
/// takes the value of the fine site at the same physical position.
pub fn restrict<T: Real>(fine: &LatticeField<T>, coarse: &LatticeDomain<T>) -> Result<LatticeField<T>> {
    let fd = fine.domain();
    let not_nested = |reason: &str| Error::NotNested {
        fine: fd.eps().as_f64(),
        coarse: coarse.eps().as_f64(),
        reason: reason.to_string(),
    };
    if fd.n() != coarse.n() {
        return Err(not_nested("dimensions differ"));
    }
    let m = nesting_level(fd.eps(), coarse.eps()).ok_or_else(|| not_nested("spacing ratio is not a power of two"))?;
    let factor = 1usize << m;
    if coarse.lateral_halfwidth() * factor > fd.lateral_halfwidth() || coarse.height() * factor > fd.height() {
        return Err(not_nested("coarse extents exceed the fine lattice"));
    }
    let mut idx = vec![0i64; coarse.n()];
    let values = (0..coarse.site_count())
        .map(|o| {
            coarse.index_into(o, &mut idx);
            for i in idx.iter_mut() {
                *i *= factor as i64;
            }
            fine.values()[fd.offset(&idx).expect("nested site exists")]
        })
        .collect();
    LatticeField::from_values(coarse.clone(), values, fine.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_when_lattices_match() {
        let d = LatticeDomain::new(2, 0.5, 3, 3).unwrap();
        let f = LatticeField::from_fn(d.clone(), |x| x[0] * 3.0 - x[1]);
        assert_eq!(restrict(&f, &d).unwrap(), f);
    }

    #[test]
    fn injection_of_exact_function() {
        let fine = LatticeDomain::new(2, 0.25, 8, 8).unwrap();
        let coarse = LatticeDomain::new(2, 0.5, 4, 4).unwrap();
        let f = LatticeField::from_fn(fine, |x| x[1]);
        let r = restrict(&f, &coarse).unwrap();
        assert_eq!(r, LatticeField::from_fn(coarse, |x| x[1]));
    }

    #[test]
    fn picks_even_fine_indices() {
        // Index-arithmetic oracle: coarse index i sits on fine index 2i.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let fine = LatticeDomain::new(1, 0.25, 0, 2).unwrap();
        let values: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        let f = LatticeField::from_values(fine, values.clone(), 0.0).unwrap();
        let coarse = LatticeDomain::new(1, 0.5, 0, 1).unwrap();
        let r = restrict(&f, &coarse).unwrap();
        assert_eq!(r.values(), &[values[0], values[2]]);
    }

    #[test]
    fn rejects_non_nested() {
        let fine = LatticeDomain::new(2, 0.25, 8, 8).unwrap();
        let f = LatticeField::constant(fine, 1.0);
        assert!(restrict(&f, &LatticeDomain::new(2, 0.75, 2, 2).unwrap()).is_err());
        assert!(restrict(&f, &LatticeDomain::new(2, 0.5, 5, 4).unwrap()).is_err());
        assert!(restrict(&f, &LatticeDomain::new(3, 0.5, 1, 1).unwrap()).is_err());
        assert!(restrict(&f, &LatticeDomain::new(2, 0.125, 1, 1).unwrap()).is_err());
        assert_eq!(nesting_level(0.025, 0.4), Some(4));
        assert_eq!(nesting_level(0.1, 0.3), None);
    }
}
