//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.

use alloc::vec::Vec;


use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
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
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive bisection driven by the Kronrod–Gauss difference.
/// Infinite endpoints are handled by [`integrate_interval`].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return integrate_interval(f, a, b, opts);
    }
    integrate_finite(f, a, b, opts)
}

fn integrate_finite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let (value, error) = gk15(&mut f, lo, hi);
    let mut segments = Vec::with_capacity(64);
    segments.push(Segment { a: lo, b: hi, value, error });
    let mut evaluations = 15;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { value: total, abs_error: err });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(Estimate { value: sign * total, abs_error: err, evaluations });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature { value: sign * total, abs_error: err });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Quadrature { value: sign * total, abs_error: err });
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        segments.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        segments.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
}

/// `∫_a^∞ f`, through the substitution `t = a + x / (1 - x)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: QuadOptions) -> Result<Estimate> {
    integrate_finite(
        |x| {
            if x >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - x;
            let v = f(a + x / om);
            if v == 0.0 { 0.0 } else { v / (om * om) }
        },
        0.0,
        1.0,
        opts,
    )
}

/// `∫_{-∞}^b f`.
pub fn integrate_from_neg_infinity<F: FnMut(f64) -> f64>(mut f: F, b: f64, opts: QuadOptions) -> Result<Estimate> {
    integrate_to_infinity(|s| f(2.0 * b - s), b, opts)
}

/// Dispatches on which endpoints are infinite. `lo < hi` is not required.
pub fn integrate_interval<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, opts: QuadOptions) -> Result<Estimate> {
    if lo > hi {
        let e = integrate_interval(f, hi, lo, opts)?;
        return Ok(Estimate { value: -e.value, ..e });
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate_finite(f, lo, hi, opts),
        (true, false) => integrate_to_infinity(f, lo, opts),
        (false, true) => integrate_from_neg_infinity(f, hi, opts),
        (false, false) => {
            let left = integrate_from_neg_infinity(&mut f, 0.0, opts)?;
            let right = integrate_to_infinity(&mut f, 0.0, opts)?;
            Ok(Estimate {
                value: left.value + right.value,
                abs_error: left.abs_error + right.abs_error,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Fixed five-point Gauss–Legendre rule, exact for degree 9.
pub fn gauss_legendre5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL5_X.iter().zip(GL5_W.iter()).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-14);
        assert!((gauss_legendre5(|x| x.powi(9), 0.0, 1.0) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn semi_infinite_and_full_line() {
        let opts = QuadOptions::default();
        let e = integrate_to_infinity(|t| 1.0 / (t * t), 1.0, opts).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11);
        let e = integrate_interval(|t| 1.0 / (1.0 + t * t), f64::NEG_INFINITY, f64::INFINITY, opts).unwrap();
        assert!((e.value - PI).abs() < 1e-11);
        let e = integrate_from_neg_infinity(|t| t.exp(), 0.0, opts).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let r = integrate_to_infinity(|t| 1.0 / t, 1.0, QuadOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let e = integrate(|x| x, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((e.value + 0.5).abs() < 1e-15);
    }
}
