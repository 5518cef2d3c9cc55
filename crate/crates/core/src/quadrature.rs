//! Adaptive Gauss–Kronrod (7/15) integration on finite intervals.

use alloc::vec::Vec;

use crate::error::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
/// Gauss weights for the even-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Estimate { value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, bisecting the
/// interval with the largest error estimate until the total error is below
/// tolerance or `max_intervals` is reached.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<Estimate, Error> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature interval must be finite"));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut pieces: Vec<(f64, f64, Estimate)> = Vec::new();
    let first = gk15(&f, a, b);
    pieces.push((a, b, first));
    let mut total = first;
    while total.error > tol {
        if pieces.len() >= max_intervals {
            return Err(Error::NonConvergence {
                routine: "adaptive Gauss-Kronrod quadrature",
                iterations: pieces.len(),
                residual: total.error,
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, est) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let left = gk15(&f, lo, mid);
        let right = gk15(&f, mid, hi);
        total.value += left.value + right.value - est.value;
        total.error += left.error + right.error - est.error;
        pieces.push((lo, mid, left));
        pieces.push((mid, hi, right));
        if !total.value.is_finite() {
            return Err(Error::NonConvergence {
                routine: "adaptive Gauss-Kronrod quadrature",
                iterations: pieces.len(),
                residual: f64::INFINITY,
            });
        }
    }
    // Re-sum to shed the drift of the incremental updates.
    let value = pieces.iter().map(|p| p.2.value).sum();
    let error = pieces.iter().map(|p| p.2.error).sum();
    Ok(Estimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let e = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 10).unwrap();
        assert!((e.value - (20.0 - 8.0 + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let e = integrate(libm::sin, 0.0, core::f64::consts::PI, 1e-13, 100).unwrap();
        assert!((e.value - 2.0).abs() < 1e-13);
        let e = integrate(|x| libm::exp(-x * x), -8.0, 8.0, 1e-13, 200).unwrap();
        assert!((e.value - libm::sqrt(core::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let e = integrate(|x| if x > 0.0 { 1.0 / libm::sqrt(x) } else { 0.0 }, 0.0, 1.0, 1e-8, 2000).unwrap();
        assert!((e.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn reports_nonconvergence() {
        let r = integrate(|x| libm::sin(1.0 / x), 1e-9, 1.0, 1e-14, 8);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
