//! Model manifolds: radial Euclidean domains and warped products `ℝ × N`
//! with metric `dt² + η(t)² g_N`, `vol(N) = 1`.
//!
//! Everything radial reduces to the area function `A(t)`: `ω_{m-1} t^{m-1}`
//! for Euclidean domains and `η(t)^{m-1}` for warped products.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{self, QuadOptions};

/// Far point used by the numeric end test.
const SLOPE_PROBE: f64 = 1.0e6;
/// Band around the critical log-log slope `-1` where the numeric test abstains.
const SLOPE_BAND: f64 = 1.0e-3;

/// Growth law of `η` (or of `A`) along one end, `c|t|^exponent` or `c e^{rate|t|}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailLaw {
    Power { exponent: f64 },
    Exponential { rate: f64 },
}

impl TailLaw {
    fn scaled(self, k: f64) -> Self {
        match self {
            TailLaw::Power { exponent } => TailLaw::Power { exponent: k * exponent },
            TailLaw::Exponential { rate } => TailLaw::Exponential { rate: k * rate },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Plus => "+inf",
            Direction::Minus => "-inf",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndType {
    Parabolic,
    Hyperbolic,
}

/// Closed interval of `t`-values; either endpoint may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(invalid("domain needs lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn unbounded(&self, dir: Direction) -> bool {
        match dir {
            Direction::Plus => self.hi == f64::INFINITY,
            Direction::Minus => self.lo == f64::NEG_INFINITY,
        }
    }
}

/// Clamped cubic spline through `(t, η(t))` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedWarp {
    ts: Vec<f64>,
    etas: Vec<f64>,
    moments: Vec<f64>,
    tail_plus: Option<TailLaw>,
    tail_minus: Option<TailLaw>,
}

impl TabulatedWarp {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(invalid("tabulated warp needs at least 4 samples"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid("tabulated warp samples must be strictly increasing in t"));
        }
        if samples.iter().any(|s| !(s.1 > 0.0) || !s.1.is_finite() || !s.0.is_finite()) {
            return Err(invalid("tabulated warp values must be finite and positive"));
        }
        let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let etas: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let n = ts.len();
        // End slopes from three-point one-sided differences.
        let slope0 = {
            let w = crate::fd::weights(ts[0], &ts[..3], 1);
            w.iter().zip(&etas[..3]).map(|(a, b)| a * b).sum::<f64>()
        };
        let slope1 = {
            let w = crate::fd::weights(ts[n - 1], &ts[n - 3..], 1);
            w.iter().zip(&etas[n - 3..]).map(|(a, b)| a * b).sum::<f64>()
        };
        let moments = clamped_spline_moments(&ts, &etas, slope0, slope1);
        Ok(Self { ts, etas, moments, tail_plus: None, tail_minus: None })
    }

    /// Declares the growth of `η` beyond the last (`Plus`) or before the first
    /// (`Minus`) sample. The warp is then continued past that sample by the law,
    /// matched to the end value: `η_end ((s + c)/c)^a` for `Power`, `η_end e^{r s}`
    /// for `Exponential`, with `s` the distance past the sample and `c = max(|t_end|, 1)`.
    pub fn with_tail(mut self, dir: Direction, law: TailLaw) -> Self {
        match dir {
            Direction::Plus => self.tail_plus = Some(law),
            Direction::Minus => self.tail_minus = Some(law),
        }
        self
    }

    pub fn range(&self) -> (f64, f64) {
        (self.ts[0], self.ts[self.ts.len() - 1])
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.etas.iter().copied())
    }

    /// `[ln η, η'/η, η''/η]`, from the spline inside the sample range and from
    /// the tail laws outside it.
    fn log_jet(&self, t: f64) -> [f64; 3] {
        let (a, b) = self.range();
        let tail = if t > b {
            self.tail_plus.map(|law| (law, t - b, b, self.etas[self.etas.len() - 1], 1.0))
        } else if t < a {
            self.tail_minus.map(|law| (law, a - t, a, self.etas[0], -1.0))
        } else {
            None
        };
        match tail {
            Some((TailLaw::Power { exponent: k }, s, end, eta, sign)) => {
                let c = end.abs().max(1.0);
                let x = s + c;
                [eta.ln() + k * (x / c).ln(), sign * k / x, k * (k - 1.0) / (x * x)]
            }
            Some((TailLaw::Exponential { rate }, s, _, eta, sign)) => [eta.ln() + rate * s, sign * rate, rate * rate],
            None => {
                let [v, d1, d2] = self.eval(t);
                [v.ln(), d1 / v, d2 / v]
            }
        }
    }

    /// Value and first two derivatives of the interpolant.
    fn eval(&self, t: f64) -> [f64; 3] {
        let n = self.ts.len();
        let k = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let (t0, t1) = (self.ts[k], self.ts[k + 1]);
        let h = t1 - t0;
        let (y0, y1) = (self.etas[k], self.etas[k + 1]);
        let (m0, m1) = (self.moments[k], self.moments[k + 1]);
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        [value, d1, d2]
    }
}

fn clamped_spline_moments(ts: &[f64], ys: &[f64], s0: f64, s1: f64) -> Vec<f64> {
    let n = ts.len();
    let h: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sub = alloc::vec![0.0; n];
    let mut diag = alloc::vec![0.0; n];
    let mut sup = alloc::vec![0.0; n];
    let mut rhs = alloc::vec![0.0; n];
    diag[0] = h[0] / 3.0;
    sup[0] = h[0] / 6.0;
    rhs[0] = (ys[1] - ys[0]) / h[0] - s0;
    for i in 1..n - 1 {
        sub[i] = h[i - 1] / 6.0;
        diag[i] = (h[i - 1] + h[i]) / 3.0;
        sup[i] = h[i] / 6.0;
        rhs[i] = (ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1];
    }
    sub[n - 1] = h[n - 2] / 6.0;
    diag[n - 1] = h[n - 2] / 3.0;
    rhs[n - 1] = s1 - (ys[n - 1] - ys[n - 2]) / h[n - 2];
    crate::linalg::solve_tridiagonal(&sub, &diag, &sup, &rhs)
}

/// Warp function `η(t) > 0` of a warped product.
#[derive(Clone, Debug, PartialEq)]
pub enum WarpFunction {
    /// `(t² + σ²)^{α/2}`; `σ = 0` gives `|t|^α`.
    Power { alpha: f64, sigma: f64 },
    /// `e^{βt}`.
    Exponential { beta: f64 },
    Cosh,
    /// `(1 + t²)^{α/2}`.
    PolyEven { alpha: f64 },
    Tabulated(TabulatedWarp),
}

impl WarpFunction {
    pub fn kind_name(&self) -> &'static str {
        match self {
            WarpFunction::Power { .. } => "power",
            WarpFunction::Exponential { .. } => "exponential",
            WarpFunction::Cosh => "cosh",
            WarpFunction::PolyEven { .. } => "poly_even",
            WarpFunction::Tabulated(_) => "tabulated",
        }
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.log_eta(t).exp()
    }

    pub fn log_eta(&self, t: f64) -> f64 {
        match *self {
            WarpFunction::Power { alpha, sigma } => 0.5 * alpha * (t * t + sigma * sigma).ln(),
            WarpFunction::Exponential { beta } => beta * t,
            WarpFunction::Cosh => {
                let a = t.abs();
                a + (-2.0 * a).exp().ln_1p() - core::f64::consts::LN_2
            }
            WarpFunction::PolyEven { alpha } => 0.5 * alpha * (t * t).ln_1p(),
            WarpFunction::Tabulated(ref tab) => tab.log_jet(t)[0],
        }
    }

    /// `η'/η`.
    pub fn log_d1(&self, t: f64) -> f64 {
        match *self {
            WarpFunction::Power { alpha, sigma } => alpha * t / (t * t + sigma * sigma),
            WarpFunction::Exponential { beta } => beta,
            WarpFunction::Cosh => t.tanh(),
            WarpFunction::PolyEven { alpha } => alpha * t / (1.0 + t * t),
            WarpFunction::Tabulated(ref tab) => tab.log_jet(t)[1],
        }
    }

    /// `η''/η`.
    pub fn ratio_d2(&self, t: f64) -> f64 {
        match *self {
            WarpFunction::Power { alpha, sigma } => power_ratio_d2(alpha, t, t * t + sigma * sigma),
            WarpFunction::Exponential { beta } => beta * beta,
            WarpFunction::Cosh => 1.0,
            WarpFunction::PolyEven { alpha } => power_ratio_d2(alpha, t, 1.0 + t * t),
            WarpFunction::Tabulated(ref tab) => tab.log_jet(t)[2],
        }
    }

    /// `(log η)'' = η''/η - (η'/η)²`.
    pub fn log_d2(&self, t: f64) -> f64 {
        match *self {
            WarpFunction::Power { alpha, sigma } => {
                let s2 = t * t + sigma * sigma;
                alpha * (sigma * sigma - t * t) / (s2 * s2)
            }
            WarpFunction::Exponential { .. } => 0.0,
            WarpFunction::Cosh => {
                let c = t.cosh();
                if c.is_finite() { 1.0 / (c * c) } else { 0.0 }
            }
            WarpFunction::PolyEven { alpha } => {
                let s2 = 1.0 + t * t;
                alpha * (1.0 - t * t) / (s2 * s2)
            }
            WarpFunction::Tabulated(_) => {
                let l1 = self.log_d1(t);
                self.ratio_d2(t) - l1 * l1
            }
        }
    }

    pub fn tail(&self, dir: Direction) -> Option<TailLaw> {
        match *self {
            WarpFunction::Power { alpha, .. } | WarpFunction::PolyEven { alpha } => {
                Some(TailLaw::Power { exponent: alpha })
            }
            WarpFunction::Exponential { beta } => Some(TailLaw::Exponential { rate: dir.sign() * beta }),
            WarpFunction::Cosh => Some(TailLaw::Exponential { rate: 1.0 }),
            WarpFunction::Tabulated(ref tab) => match dir {
                Direction::Plus => tab.tail_plus,
                Direction::Minus => tab.tail_minus,
            },
        }
    }
}

fn power_ratio_d2(alpha: f64, t: f64, s2: f64) -> f64 {
    alpha / s2 + alpha * (alpha - 2.0) * t * t / (s2 * s2)
}

/// Area `ω_{m-1}` of the unit `(m-1)`-sphere, `2π^{m/2} / Γ(m/2)`.
pub fn unit_sphere_area(m: u32) -> f64 {
    let half = f64::from(m) / 2.0;
    2.0 * PI.powf(half) / libm::tgamma(half)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelManifold {
    RadialEuclidean { m: u32, domain: Interval },
    WarpedProduct { m: u32, warp: WarpFunction, domain: Interval, ricci_n_lower: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityViolation {
    pub t: f64,
    /// `η''(t)`; must be positive.
    pub eta_d2: f64,
    /// `(m-2)(log η)''(t) + η(t)^{-2} Ric_N`; must be non-negative.
    pub curvature_term: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub ok: bool,
    pub samples: usize,
    pub violations: Vec<AdmissibilityViolation>,
}

impl ModelManifold {
    /// Radial Euclidean domain `{lo ≤ |x| ≤ hi}` in `ℝ^m`.
    pub fn radial_euclidean(m: u32, lo: f64, hi: f64) -> Result<Self> {
        if m < 2 {
            return Err(invalid("radial Euclidean domains need m >= 2"));
        }
        if lo < 0.0 {
            return Err(invalid("radial coordinate must be non-negative"));
        }
        Ok(ModelManifold::RadialEuclidean { m, domain: Interval::new(lo, hi)? })
    }

    /// Warped product `ℝ × N^{m-1}` restricted to `lo ≤ t ≤ hi`.
    ///
    /// `m = 2` is accepted (one-dimensional fibre); the Poincaré weight then vanishes.
    pub fn warped_product(m: u32, warp: WarpFunction, lo: f64, hi: f64, ricci_n_lower: f64) -> Result<Self> {
        if m < 2 {
            return Err(invalid("warped products need m >= 2"));
        }
        let domain = Interval::new(lo, hi)?;
        match &warp {
            WarpFunction::Power { alpha, sigma } => {
                if !alpha.is_finite() || *sigma < 0.0 {
                    return Err(invalid("power warp needs finite alpha and sigma >= 0"));
                }
                if *sigma == 0.0 && domain.contains(0.0) {
                    return Err(invalid("power warp with sigma = 0 is singular at t = 0"));
                }
            }
            WarpFunction::Exponential { beta } if !beta.is_finite() => return Err(invalid("beta must be finite")),
            WarpFunction::PolyEven { alpha } if !alpha.is_finite() => return Err(invalid("alpha must be finite")),
            WarpFunction::Tabulated(tab) => {
                let (a, b) = tab.range();
                if (domain.lo < a && tab.tail_minus.is_none()) || (domain.hi > b && tab.tail_plus.is_none()) {
                    return Err(invalid("domain exceeds the tabulated sample range and no tail law is declared"));
                }
                // The spline may dip below zero between samples.
                let (lo, hi) = (domain.lo.max(a), domain.hi.min(b));
                let n = 64 * tab.ts.len();
                for k in 0..=n {
                    let t = lo + (hi - lo) * k as f64 / n as f64;
                    if !(tab.eval(t)[0] > 0.0) {
                        return Err(invalid("tabulated warp is not positive on the domain"));
                    }
                }
            }
            _ => {}
        }
        if !ricci_n_lower.is_finite() {
            return Err(invalid("ricci_N_lower must be finite"));
        }
        Ok(ModelManifold::WarpedProduct { m, warp, domain, ricci_n_lower })
    }

    pub fn m(&self) -> u32 {
        match *self {
            ModelManifold::RadialEuclidean { m, .. } | ModelManifold::WarpedProduct { m, .. } => m,
        }
    }

    pub fn domain(&self) -> Interval {
        match *self {
            ModelManifold::RadialEuclidean { domain, .. } | ModelManifold::WarpedProduct { domain, .. } => domain,
        }
    }

    /// Same geometry on a different `t`-range.
    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Self> {
        match self {
            ModelManifold::RadialEuclidean { m, .. } => Self::radial_euclidean(*m, lo, hi),
            ModelManifold::WarpedProduct { m, warp, ricci_n_lower, .. } => {
                Self::warped_product(*m, warp.clone(), lo, hi, *ricci_n_lower)
            }
        }
    }

    pub fn check(&self, t: f64) -> Result<()> {
        let d = self.domain();
        if d.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain { t, lo: d.lo, hi: d.hi })
        }
    }

    fn mf(&self) -> f64 {
        f64::from(self.m() - 1)
    }

    pub fn area(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.area_unchecked(t))
    }

    pub(crate) fn area_unchecked(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { m, .. } => unit_sphere_area(*m) * t.powi(*m as i32 - 1),
            ModelManifold::WarpedProduct { .. } => self.log_area_unchecked(t).exp(),
        }
    }

    pub fn log_area(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.log_area_unchecked(t))
    }

    pub(crate) fn log_area_unchecked(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { m, .. } => unit_sphere_area(*m).ln() + self.mf() * t.ln(),
            ModelManifold::WarpedProduct { warp, .. } => self.mf() * warp.log_eta(t),
        }
    }

    /// `A'/A`.
    pub fn log_area_d1(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { .. } => self.mf() / t,
            ModelManifold::WarpedProduct { warp, .. } => self.mf() * warp.log_d1(t),
        }
    }

    /// `(A'/A)'`.
    pub fn log_area_d2(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { .. } => -self.mf() / (t * t),
            ModelManifold::WarpedProduct { warp, .. } => self.mf() * warp.log_d2(t),
        }
    }

    /// Principal curvature of the level sets `{t} × N`: `1/t` or `η'/η`.
    ///
    /// The Hessian of a radial `u` is `diag(u'', h u', …, h u')` in an adapted frame.
    pub fn level_curvature(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { .. } => 1.0 / t,
            ModelManifold::WarpedProduct { warp, .. } => warp.log_d1(t),
        }
    }

    /// `ρ = (m-2) η''/η`.
    pub fn weight_rho(&self, t: f64) -> Result<f64> {
        match self {
            ModelManifold::RadialEuclidean { .. } => Err(Error::UnsupportedVariant("weight_rho needs a warped product")),
            ModelManifold::WarpedProduct { m, warp, .. } => {
                self.check(t)?;
                Ok(f64::from(*m - 2) * warp.ratio_d2(t))
            }
        }
    }

    /// `Ric(∂t, ∂t)`: zero for Euclidean domains, `-(m-1) η''/η` for warped products.
    pub fn radial_ricci(&self, t: f64) -> f64 {
        match self {
            ModelManifold::RadialEuclidean { .. } => 0.0,
            ModelManifold::WarpedProduct { warp, .. } => -self.mf() * warp.ratio_d2(t),
        }
    }

    /// `Ric(∇u, ∇u)` for radial `u` with `|∇u|² = grad_sq`; equals `-(m-1)/(m-2) ρ |∇u|²` when `m > 2`.
    pub fn radial_ricci_term(&self, t: f64, grad_sq: f64) -> Result<f64> {
        if grad_sq < 0.0 {
            return Err(invalid("grad_sq must be non-negative"));
        }
        self.check(t)?;
        Ok(self.radial_ricci(t) * grad_sq)
    }

    pub fn admissibility_check(&self, samples: &[f64]) -> Result<AdmissibilityReport> {
        let ModelManifold::WarpedProduct { m, warp, ricci_n_lower, .. } = self else {
            return Err(Error::UnsupportedVariant("admissibility applies to warped products"));
        };
        if samples.is_empty() {
            return Err(invalid("empty sample list"));
        }
        let mut violations = Vec::new();
        for &t in samples {
            self.check(t)?;
            let eta = warp.eta(t);
            let eta_d2 = warp.ratio_d2(t) * eta;
            let curvature_term = f64::from(*m - 2) * warp.log_d2(t) + ricci_n_lower / (eta * eta);
            if !(eta_d2 > 0.0) || curvature_term < 0.0 {
                violations.push(AdmissibilityViolation { t, eta_d2, curvature_term });
            }
        }
        Ok(AdmissibilityReport { ok: violations.is_empty(), samples: samples.len(), violations })
    }

    /// Growth law of `A` along an end, when known in closed form or declared.
    pub fn area_tail(&self, dir: Direction) -> Option<TailLaw> {
        match self {
            ModelManifold::RadialEuclidean { .. } => match dir {
                Direction::Plus => Some(TailLaw::Power { exponent: self.mf() }),
                Direction::Minus => None,
            },
            ModelManifold::WarpedProduct { warp, .. } => warp.tail(dir).map(|l| l.scaled(self.mf())),
        }
    }

    /// `A(t)^{-1/(p-1)}`, evaluated in log space so that huge areas do not overflow.
    pub fn inv_area_root(&self, t: f64, p: f64) -> f64 {
        (-self.log_area_unchecked(t) / (p - 1.0)).exp()
    }

    /// Log-log slope of `A^{-1/(p-1)}` toward an end: `-(t A'/A)/(p-1)`.
    pub fn end_integrand_slope(&self, p: f64, t: f64) -> f64 {
        -t * self.log_area_d1(t) / (p - 1.0)
    }

    /// Integral test decided from the log-log slope of the integrand far out
    /// (`|t| = 10⁵` and `10⁶`).
    pub fn integral_test_numeric(&self, p: f64, dir: Direction) -> Result<EndType> {
        if !self.domain().unbounded(dir) {
            return Err(invalid("domain is bounded in this direction"));
        }
        if let ModelManifold::WarpedProduct { warp: WarpFunction::Tabulated(_), .. } = self {
            return Err(Error::NeedsAsymptotics);
        }
        let far = dir.sign() * SLOPE_PROBE;
        let near = dir.sign() * SLOPE_PROBE / 10.0;
        let s_far = self.end_integrand_slope(p, far);
        let s_near = self.end_integrand_slope(p, near);
        let stable = (s_far - s_near).abs() <= 1e-2 * s_far.abs().max(1.0) || (s_far < -1e3 && s_near < -1e2)
            || (s_far > 1e3 && s_near > 1e2);
        if !stable || s_far.is_nan() {
            return Err(Error::NeedsAsymptotics);
        }
        if s_far < -1.0 - SLOPE_BAND {
            Ok(EndType::Hyperbolic)
        } else if s_far > -1.0 + SLOPE_BAND {
            Ok(EndType::Parabolic)
        } else {
            Err(Error::NeedsAsymptotics)
        }
    }

    /// p-parabolic / p-hyperbolic classification of the end in direction `dir`:
    /// hyperbolic iff `∫^∞ A^{-1/(p-1)} dt < ∞`.
    ///
    /// The numeric slope test decides first; the borderline slope `-1` is
    /// settled by the tail law of `A`.
    pub fn classify_end(&self, p: f64, dir: Direction) -> Result<EndType> {
        if !(p > 1.0) {
            return Err(invalid("p must exceed 1"));
        }
        if !self.domain().unbounded(dir) {
            return Err(invalid("domain is bounded in this direction"));
        }
        match self.integral_test_numeric(p, dir) {
            Ok(end) => Ok(end),
            Err(Error::NeedsAsymptotics) => {
                let law = self.area_tail(dir).ok_or(Error::NeedsAsymptotics)?;
                Ok(classify_by_law(law, p))
            }
            Err(e) => Err(e),
        }
    }

    /// `V(R2) - V(R1) = ∫_{R1}^{R2} A(t) dt`; `R2 = ∞` gives the tail volume.
    pub fn volume_between(&self, r1: f64, r2: f64) -> Result<f64> {
        if r1 > r2 || r1.is_nan() || r2.is_nan() {
            return Err(invalid("volume_between needs R1 <= R2"));
        }
        self.check(r1)?;
        if r2.is_finite() {
            self.check(r2)?;
        } else if !self.domain().unbounded(Direction::Plus) {
            return Err(invalid("domain is bounded above"));
        }
        if r1 == r2 {
            return Ok(0.0);
        }
        let est = quadrature::integrate_interval(|t| self.area_unchecked(t), r1, r2, QuadOptions::default())?;
        Ok(est.value)
    }

    /// `∫_a^b A^{-1/(p-1)} dt` (the radial p-resistance), closed form when available.
    /// Infinite endpoints are allowed.
    pub fn radial_resistance(&self, p: f64, a: f64, b: f64) -> Result<f64> {
        if !(p > 1.0) {
            return Err(invalid("p must exceed 1"));
        }
        if !(a < b) {
            return Err(invalid("need a < b"));
        }
        let d = self.domain();
        if a < d.lo || b > d.hi {
            return Err(Error::Domain { t: if a < d.lo { a } else { b }, lo: d.lo, hi: d.hi });
        }
        if let Some(v) = self.radial_resistance_closed_form(p, a, b) {
            return Ok(v);
        }
        self.radial_resistance_quadrature(p, a, b)
    }

    /// Adaptive-quadrature route for [`Self::radial_resistance`].
    pub fn radial_resistance_quadrature(&self, p: f64, a: f64, b: f64) -> Result<f64> {
        if let ModelManifold::RadialEuclidean { .. } = self {
            if a <= 0.0 {
                return Err(invalid("A vanishes at the origin"));
            }
        }
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 4000 };
        let f = |t: f64| self.inv_area_root(t, p);
        if b.is_finite() && b > 100.0 * a.max(1.0) {
            // t = e^s keeps radii up to the f64 range within reach of the adaptive rule.
            let (head, from) = if a < 1.0 { (quadrature::integrate_interval(f, a, 1.0, opts)?.value, 1.0) } else { (0.0, a) };
            // Unit chunks in s, so a sharply decaying integrand is not missed by
            // a rule whose nodes all sit where it has underflowed.
            let (s0, s1) = (from.ln(), b.ln());
            let chunks = (s1 - s0).ceil().max(1.0) as usize;
            let width = (s1 - s0) / chunks as f64;
            let mut tail = 0.0;
            for k in 0..chunks {
                let lo = s0 + width * k as f64;
                let hi = if k + 1 == chunks { s1 } else { lo + width };
                tail += quadrature::integrate_interval(|s: f64| { let t = s.exp(); t * f(t) }, lo, hi, opts)?.value;
            }
            return Ok(head + tail);
        }
        Ok(quadrature::integrate_interval(f, a, b, opts)?.value)
    }

    fn radial_resistance_closed_form(&self, p: f64, a: f64, b: f64) -> Option<f64> {
        match self {
            ModelManifold::RadialEuclidean { m, .. } => {
                if a <= 0.0 {
                    return None;
                }
                let k = self.mf() / (p - 1.0);
                let c = unit_sphere_area(*m).powf(-1.0 / (p - 1.0));
                if (k - 1.0).abs() < 1e-14 {
                    return Some(c * (b / a).ln());
                }
                let e = 1.0 - k;
                let tail = |t: f64| if t.is_infinite() { 0.0 } else { t.powf(e) };
                if b.is_infinite() && k <= 1.0 {
                    return Some(f64::INFINITY);
                }
                Some(c * (tail(b) - a.powf(e)) / e)
            }
            ModelManifold::WarpedProduct { warp, .. } => match *warp {
                WarpFunction::Exponential { beta } => {
                    let c = self.mf() * beta / (p - 1.0);
                    if c == 0.0 {
                        return Some(b - a);
                    }
                    let ex = |t: f64| (-c * t).exp();
                    Some((ex(a) - ex(b)) / c)
                }
                WarpFunction::PolyEven { alpha } => {
                    let e = alpha * self.mf() / (2.0 * (p - 1.0));
                    if (e - 1.0).abs() < 1e-14 {
                        Some(b.atan() - a.atan())
                    } else if e == 0.0 {
                        Some(b - a)
                    } else {
                        None
                    }
                }
                _ => None,
            },
        }
    }
}

pub(crate) fn classify_by_law(law: TailLaw, p: f64) -> EndType {
    let converges = match law {
        TailLaw::Power { exponent } => exponent / (p - 1.0) > 1.0,
        TailLaw::Exponential { rate } => rate > 0.0,
    };
    if converges { EndType::Hyperbolic } else { EndType::Parabolic }
}
