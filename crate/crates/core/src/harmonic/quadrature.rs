//! Adaptive Gauss-Kronrod (7/15) integration on a fixed initial panel split.

use crate::scalar::Real;

// Nodes and weights as tabulated, digits beyond f64 kept for reference.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

fn gk15<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> Estimate<T> {
    let half = T::lit(0.5) * (b - a);
    let mid = T::lit(0.5) * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`, starting from `panels` equal panels and
/// bisecting the panel with the largest error estimate until the summed
/// estimate drops below `tol` or `max_panels` is reached.
///
/// The refinement sequence depends only on the integrand values, so the
/// result is bitwise reproducible.
pub fn integrate<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    panels: usize,
    tol: T,
    max_panels: usize,
) -> Estimate<T> {
    let panels = panels.max(1);
    let step = (b - a) / T::from_count(panels);
    let mut parts: Vec<(T, T, Estimate<T>)> = (0..panels)
        .map(|k| {
            let lo = a + step * T::from_count(k);
            let hi = if k + 1 == panels {
                b
            } else {
                a + step * T::from_count(k + 1)
            };
            (lo, hi, gk15(&mut f, lo, hi))
        })
        .collect();
    loop {
        let total: T = parts.iter().map(|p| p.2.error).sum();
        if total <= tol || parts.len() >= max_panels {
            break;
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, p)| {
                if p.2.error > be {
                    (i, p.2.error)
                } else {
                    (bi, be)
                }
            });
        let (lo, hi, _) = parts[worst];
        let mid = T::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            // panel cannot be split further in this precision
            break;
        }
        parts[worst] = (lo, mid, gk15(&mut f, lo, mid));
        parts.insert(worst + 1, (mid, hi, gk15(&mut f, mid, hi)));
    }
    Estimate {
        value: parts.iter().map(|p| p.2.value).sum(),
        error: parts.iter().map(|p| p.2.error).sum(),
    }
}
