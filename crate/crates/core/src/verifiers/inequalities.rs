use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

const DIM: usize = 3;
const RADIUS: f64 = 10.0;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `|X|^{p-2} X`, zero at the origin.
fn power_map(x: &[f64], p: f64) -> Vec<f64> {
    let n = norm(x);
    let c = if n == 0.0 { 0.0 } else { n.powf(p - 2.0) };
    x.iter().map(|v| c * v).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityGap {
    pub lhs: f64,
    pub psi: f64,
    pub ratio: f64,
}

/// `⟨X - Y, |X|^{p-2}X - |Y|^{p-2}Y⟩` and the lower-bound profile
/// `Ψ = |X - Y|^p` (`p ≥ 2`) or `(p-1)|X - Y|² (1 + |X|² + |Y|²)^{(p-2)/2}` (`p < 2`).
pub fn monotonicity_gap(x: &[f64], y: &[f64], p: f64) -> Result<MonotonicityGap> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid("vectors must have the same positive length"));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p must be a finite number > 1"));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let (vx, vy) = (power_map(x, p), power_map(y, p));
    let dv: Vec<f64> = vx.iter().zip(&vy).map(|(a, b)| a - b).collect();
    let lhs = dot(&d, &dv);
    let nd = norm(&d);
    let psi = if p >= 2.0 {
        nd.powf(p)
    } else {
        (p - 1.0) * nd * nd / (1.0 + dot(x, x) + dot(y, y)).powf(0.5 * (2.0 - p))
    };
    let ratio = if psi > 0.0 { lhs / psi } else { f64::NAN };
    Ok(MonotonicityGap { lhs, psi, ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityRow {
    pub p: f64,
    pub samples: usize,
    /// Samples with `lhs < 0` beyond rounding.
    pub negative_lhs: usize,
    /// Samples with `lhs = 0` although `X ≠ Y`.
    pub zero_lhs_unequal: usize,
    /// Smallest `lhs/Ψ` over the first sample.
    pub c_emp: f64,
    /// Fresh-sample violations of `lhs ≥ (C_emp/2) Ψ`.
    pub fresh_violations: usize,
    pub pass: bool,
}

fn sample_rng(seed: u64, phase: u64, p_index: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((phase << 56) | (p_index << 48) | k);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng) -> [f64; DIM] {
    let mut v = [0.0; DIM];
    for x in v.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
    v
}

/// Uniform direction, radius uniform on `[0, r]`.
fn ball_vec(rng: &mut ChaCha8Rng, r: f64) -> [f64; DIM] {
    let g = gaussian_vec(rng);
    let n = norm(&g).max(f64::MIN_POSITIVE);
    let s = r * rng.random::<f64>() / n;
    g.map(|x| x * s)
}

fn clip(v: [f64; DIM]) -> [f64; DIM] {
    let n = norm(&v);
    if n > RADIUS { v.map(|x| x * RADIUS / n) } else { v }
}

/// Isotropic, near-collinear, anti-collinear and near-equal pairs in turn.
fn monotonicity_pair(rng: &mut ChaCha8Rng, k: u64) -> ([f64; DIM], [f64; DIM]) {
    let x = ball_vec(rng, RADIUS);
    let y = match k % 4 {
        0 => ball_vec(rng, RADIUS),
        1 => {
            let l: f64 = 1.5 * rng.random::<f64>();
            let e = gaussian_vec(rng);
            clip(core::array::from_fn(|i| l * x[i] + 1e-6 * e[i]))
        }
        2 => {
            let l: f64 = rng.random::<f64>();
            x.map(|v| -l * v)
        }
        _ => {
            let e = gaussian_vec(rng);
            let s = 1e-6 * norm(&x).max(1e-3);
            clip(core::array::from_fn(|i| x[i] + s * e[i]))
        }
    };
    (x, y)
}

/// Seeded check of `lhs ≥ 0`, `lhs = 0 ⟺ X = Y` and `lhs ≥ (C_emp/2)Ψ`,
/// `n` pairs per exponent, `|X|, |Y| ≤ 10` in three dimensions.
pub fn monotonicity_suite(ps: &[f64], n: usize, seed: u64) -> Result<Vec<MonotonicityRow>> {
    if n == 0 {
        return Err(invalid("need at least one sample"));
    }
    let mut rows = Vec::with_capacity(ps.len());
    for (pi, &p) in ps.iter().enumerate() {
        let (mut negative, mut zero, mut c_emp) = (0, 0, f64::INFINITY);
        for k in 0..n as u64 {
            let mut rng = sample_rng(seed, 0, pi as u64, k);
            let (x, y) = monotonicity_pair(&mut rng, k);
            let g = monotonicity_gap(&x, &y, p)?;
            let nd = norm(&core::array::from_fn::<f64, DIM, _>(|i| x[i] - y[i]));
            let round = 8.0 * f64::EPSILON * nd * (norm(&x).powf(p - 1.0) + norm(&y).powf(p - 1.0));
            if g.lhs < -round {
                negative += 1;
            }
            if g.lhs == 0.0 && x != y {
                zero += 1;
            }
            if g.psi > 0.0 {
                c_emp = c_emp.min(g.ratio);
            }
        }
        let mut fresh = 0;
        for k in 0..n as u64 {
            let mut rng = sample_rng(seed, 1, pi as u64, k);
            let (x, y) = monotonicity_pair(&mut rng, k);
            let g = monotonicity_gap(&x, &y, p)?;
            if g.lhs < 0.5 * c_emp * g.psi {
                fresh += 1;
            }
        }
        let pass = negative == 0 && zero == 0 && fresh == 0 && c_emp > 0.0 && c_emp.is_finite();
        rows.push(MonotonicityRow { p, samples: n, negative_lhs: negative, zero_lhs_unequal: zero, c_emp, fresh_violations: fresh, pass });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationGap {
    /// `(|X|² + ε)^{p/2} - (|Y|² + ε)^{p/2}`.
    pub lhs: f64,
    pub a: f64,
    pub delta: f64,
    /// `a(|X|^p - |Y|^p) + δ`.
    pub rhs: f64,
    pub pass: bool,
}

/// The regularization inequality with the explicit constants
/// `a = 1 + Σ_{n=1}^q (pε/δ₁²)^n / n!`, `δ = δ₁^p Σ_{n=1}^q (pε/δ₁²)^n` for
/// `2q < p ≤ 2q + 2`, and `a = 1`, `δ = 0` for `p ≤ 2`.
pub fn regularization_gap(x: &[f64], y: &[f64], eps: f64, p: f64, delta1: f64) -> Result<RegularizationGap> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid("vectors must have the same positive length"));
    }
    if !(p >= 1.0) || !p.is_finite() || !(eps >= 0.0) || !(delta1 > 0.0) {
        return Err(invalid("need p >= 1, eps >= 0 and delta1 > 0"));
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx < ny {
        return Err(invalid("the inequality needs |X| >= |Y|"));
    }
    let (a, delta) = if p <= 2.0 {
        (1.0, 0.0)
    } else {
        let q = (p / 2.0).ceil() as i32 - 1;
        let r = p * eps / (delta1 * delta1);
        let (mut a, mut sum, mut term, mut fact) = (1.0, 0.0, 1.0, 1.0);
        for k in 1..=q {
            term *= r;
            fact *= f64::from(k);
            a += term / fact;
            sum += term;
        }
        (a, sum * delta1.powf(p))
    };
    let big_x = (nx * nx + eps).powf(0.5 * p);
    let big_y = (ny * ny + eps).powf(0.5 * p);
    let lhs = big_x - big_y;
    let rhs = a * (nx.powf(p) - ny.powf(p)) + delta;
    let round = 8.0 * f64::EPSILON * (big_x + big_y + a * (nx.powf(p) + ny.powf(p)) + delta);
    Ok(RegularizationGap { lhs, a, delta, rhs, pass: lhs <= rhs + round })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularizationRow {
    /// Exponent branch `(lo, hi]`.
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs - rhs` seen (negative when every sample holds).
    pub max_excess: f64,
    pub pass: bool,
}

/// Seeded tuples `(p, X, Y, ε, δ₁)` per exponent branch: `p` uniform on the
/// branch, `ε` and `δ₁` log-uniform on `[1e-6, 10]` and `[1e-2, 10]`.
pub fn regularization_suite(branches: &[(f64, f64)], n: usize, seed: u64) -> Result<Vec<RegularizationRow>> {
    if n == 0 {
        return Err(invalid("need at least one sample"));
    }
    let mut rows = Vec::with_capacity(branches.len());
    for (bi, &(lo, hi)) in branches.iter().enumerate() {
        if !(lo >= 1.0 && hi > lo) {
            return Err(invalid("branches are intervals (lo, hi] with 1 <= lo < hi"));
        }
        let (mut violations, mut max_excess) = (0, f64::NEG_INFINITY);
        for k in 0..n as u64 {
            let mut rng = sample_rng(seed, 2, bi as u64, k);
            let p = hi - (hi - lo) * rng.random::<f64>();
            let mut x = ball_vec(&mut rng, RADIUS);
            let mut y = match k % 3 {
                0 => ball_vec(&mut rng, RADIUS),
                1 => {
                    // |Y| just below |X|.
                    let g = gaussian_vec(&mut rng);
                    let s = norm(&x) * (1.0 - 1e-6 * rng.random::<f64>()) / norm(&g).max(f64::MIN_POSITIVE);
                    g.map(|v| v * s)
                }
                _ => ball_vec(&mut rng, 1e-2),
            };
            if norm(&x) < norm(&y) {
                core::mem::swap(&mut x, &mut y);
            }
            let eps = 10f64.powf(-6.0 + 7.0 * rng.random::<f64>());
            let delta1 = 10f64.powf(-2.0 + 3.0 * rng.random::<f64>());
            let g = regularization_gap(&x, &y, eps, p, delta1)?;
            max_excess = max_excess.max(g.lhs - g.rhs);
            if !g.pass {
                violations += 1;
            }
        }
        rows.push(RegularizationRow { lo, hi, samples: n, violations, max_excess, pass: violations == 0 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gap_examples() {
        let g = monotonicity_gap(&[1.0, 0.0], &[0.0, 0.0], 3.0).unwrap();
        assert_eq!((g.lhs, g.psi, g.ratio), (1.0, 1.0, 1.0));
        let g = monotonicity_gap(&[1.0, 0.0], &[1.0, 0.0], 3.0).unwrap();
        assert_eq!((g.lhs, g.psi), (0.0, 0.0));
        let g = monotonicity_gap(&[1.0, 0.0], &[-1.0, 0.0], 2.0).unwrap();
        assert_eq!((g.lhs, g.psi, g.ratio), (4.0, 4.0, 1.0));
        let g = monotonicity_gap(&[1.0, 0.0], &[0.0, 0.0], 1.5).unwrap();
        assert_relative_eq!(g.psi, 0.5 / 2f64.powf(0.25), max_relative = 1e-15);
        assert!(monotonicity_gap(&[1.0], &[1.0, 2.0], 2.0).is_err());
    }

    #[test]
    fn regularization_examples() {
        let g = regularization_gap(&[3.0, 4.0], &[1.0, 0.0], 0.7, 2.0, 0.3).unwrap();
        assert_relative_eq!(g.lhs, 24.0, max_relative = 1e-14);
        assert_eq!((g.a, g.delta), (1.0, 0.0));
        assert!(g.pass);
        let g = regularization_gap(&[2.0, 0.0], &[1.0, 0.0], 0.1, 3.0, 0.5).unwrap();
        assert_relative_eq!(g.a, 1.0 + 3.0 * 0.1 / 0.25, max_relative = 1e-15);
        assert_relative_eq!(g.delta, 1.2 * 0.125, max_relative = 1e-15);
        assert!(g.pass && g.lhs < g.rhs);
        let g = regularization_gap(&[2.0, 0.0], &[2.0, 0.0], 0.1, 5.0, 0.5).unwrap();
        assert!(g.lhs == 0.0 && g.pass);
        assert!(regularization_gap(&[1.0, 0.0], &[2.0, 0.0], 0.1, 3.0, 0.5).is_err());
    }

    #[test]
    fn suites_are_deterministic_and_pass() {
        let a = monotonicity_suite(&[1.5, 3.0], 2000, 7).unwrap();
        let b = monotonicity_suite(&[1.5, 3.0], 2000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.pass), "{a:?}");
        let r = regularization_suite(&[(1.0, 2.0), (2.0, 4.0)], 2000, 7).unwrap();
        assert!(r.iter().all(|r| r.pass), "{r:?}");
    }
}
