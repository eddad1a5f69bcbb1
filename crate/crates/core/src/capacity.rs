//! p-capacities of condensers, barrier exhaustions of ends, and the decay and
//! volume-growth bounds for p-hyperbolic ends.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::energy::{energy, EnergySpec};
use crate::error::{invalid, Error, Result};
use crate::field::DiscreteField;
use crate::geometry::{Direction, EndType, ModelManifold};
use crate::grid::{Grid, Grid1D};
use crate::solver::{epsilon_continuation, Dirichlet, PHarmonicRadial, SolveConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityMethod {
    Analytic,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: f64,
    pub p: f64,
    pub method: CapacityMethod,
    pub extremal: Option<DiscreteField>,
}

/// `Cap_p([.., a], [b, ..])` on a model manifold: `(∫_a^b A^{-1/(p-1)})^{1-p}`.
pub fn capacity_analytic(m: &ModelManifold, p: f64, a: f64, b: f64) -> Result<CapacityResult> {
    if !(a < b) {
        return Err(invalid("capacity needs a < b"));
    }
    let r = m.radial_resistance(p, a, b)?;
    Ok(CapacityResult { value: r.powf(1.0 - p), p, method: CapacityMethod::Analytic, extremal: None })
}

/// Condenser on a grid: `inner` nodes carry `inner_value`, `outer` nodes `outer_value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Condenser {
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
    pub inner_value: f64,
    pub outer_value: f64,
}

impl Condenser {
    /// First node of a 1D grid is the inner plate, last node the outer one.
    pub fn interval(grid: &Grid) -> Result<Self> {
        let g = grid.as_1d().ok_or_else(|| invalid("interval condensers need a 1D grid"))?;
        Ok(Self { inner: vec![0], outer: vec![g.len() - 1], inner_value: 1.0, outer_value: 0.0 })
    }

    /// Plates selected by predicates on node coordinates.
    pub fn from_regions(grid: &Grid, inner: impl Fn(f64, f64) -> bool, outer: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mut c = Self { inner: Vec::new(), outer: Vec::new(), inner_value: 1.0, outer_value: 0.0 };
        for k in 0..grid.len() {
            let (x, y) = grid.point(k);
            if inner(x, y) {
                c.inner.push(k);
            } else if outer(x, y) {
                c.outer.push(k);
            }
        }
        Ok(c)
    }

    pub fn with_values(mut self, inner_value: f64, outer_value: f64) -> Self {
        self.inner_value = inner_value;
        self.outer_value = outer_value;
        self
    }

    fn dirichlet(&self, grid: &Grid) -> Result<Dirichlet> {
        if self.inner.is_empty() || self.outer.is_empty() {
            return Err(invalid("both condenser plates must contain grid nodes"));
        }
        let mut v = vec![None; grid.len()];
        for &k in &self.inner {
            *v.get_mut(k).ok_or_else(|| invalid("condenser node out of range"))? = Some(self.inner_value);
        }
        for &k in &self.outer {
            let slot = v.get_mut(k).ok_or_else(|| invalid("condenser node out of range"))?;
            if slot.is_some() {
                return Err(invalid("condenser plates overlap"));
            }
            *slot = Some(self.outer_value);
        }
        Dirichlet::new(v)
    }
}

/// Solves the condenser problem by ε-continuation; the capacity is `E_p` of
/// the last iterate.
pub fn capacity_numeric(grid: &Arc<Grid>, p: f64, condenser: &Condenser, cfg: &SolveConfig) -> Result<CapacityResult> {
    let bc = condenser.dirichlet(grid)?;
    let (mut fields, _) = epsilon_continuation(p, grid, &bc, cfg)?;
    let u = fields.pop().ok_or(Error::NoData)?;
    let value = energy(&EnergySpec::raw(p)?, &u);
    Ok(CapacityResult { value, p, method: CapacityMethod::Numeric, extremal: Some(u) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    /// `Cap(a, b_k)` for increasing `b_k`; must not increase.
    pub outer_growth: Vec<(f64, f64)>,
    /// `Cap(a_k, b)` for increasing `a_k`; must not decrease.
    pub inner_growth: Vec<(f64, f64)>,
    pub outer_monotone: bool,
    pub inner_monotone: bool,
    pub repeat_equal: bool,
    /// `Cap(a, b_k)` approaches `Cap(a, ∞)` (zero on p-parabolic ends).
    pub exhaustion_limit: Option<f64>,
    pub exhaustion_converges: bool,
    pub ok: bool,
}

/// Monotonicity of `Cap_p([.., a], [b, ..])` in both plates and the exhaustion limit `b → ∞`.
pub fn capacity_monotonicity_suite(m: &ModelManifold, p: f64, a: f64, outer: &[f64], inner: &[f64], b: f64) -> Result<MonotonicityReport> {
    if outer.len() < 2 || inner.len() < 2 {
        return Err(invalid("monotonicity suite needs at least two radii per family"));
    }
    if outer.windows(2).any(|w| !(w[1] > w[0])) || inner.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("radii must increase"));
    }
    let cap = |a: f64, b: f64| capacity_analytic(m, p, a, b).map(|c| c.value);
    let outer_growth = outer.iter().map(|&bk| Ok((bk, cap(a, bk)?))).collect::<Result<Vec<_>>>()?;
    let inner_growth = inner.iter().map(|&ak| Ok((ak, cap(ak, b)?))).collect::<Result<Vec<_>>>()?;
    let slack = 1e-12;
    let outer_monotone = outer_growth.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + slack));
    let inner_monotone = inner_growth.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - slack));
    let repeat_equal = cap(a, outer[0])? == cap(a, outer[0])?;
    let (exhaustion_limit, exhaustion_converges) = if m.domain().unbounded(Direction::Plus) {
        let limit = match m.classify_end(p, Direction::Plus)? {
            EndType::Parabolic => 0.0,
            EndType::Hyperbolic => cap(a, f64::INFINITY)?,
        };
        let gaps: Vec<f64> = outer_growth.iter().map(|(_, c)| c - limit).collect();
        let conv = gaps.iter().all(|g| *g >= -1e-12 * limit.max(1e-300)) && gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack));
        (Some(limit), conv)
    } else {
        (None, true)
    };
    let ok = outer_monotone && inner_monotone && repeat_equal && exhaustion_converges;
    Ok(MonotonicityReport { outer_growth, inner_growth, outer_monotone, inner_monotone, repeat_equal, exhaustion_limit, exhaustion_converges, ok })
}

/// Barrier exhaustion of the end `[R0, ∞)`.
#[derive(Clone, Debug)]
pub struct BarrierSweep {
    /// `u_i = 1 - Φ(R0, t)/Φ(R0, R_i)` restricted to the compact set `[R0, R0 + 1]`.
    pub barriers: Vec<DiscreteField>,
    pub radii: Vec<f64>,
    /// `sup_{[R0, R0+1]} (1 - u_i)`.
    pub deviations: Vec<f64>,
    /// `E_p` of the limit barrier, `Φ(R0, ∞)^{1-p}`, zero when `Φ(R0, ∞) = ∞`.
    pub limit_energy: f64,
    pub diagnosis: EndType,
    pub integral_test: EndType,
}

/// Parabolic when the barriers tend to 1 on `[R0, R0+1]` (deviation below
/// `10⁻³` at the largest radius), hyperbolic when the deviation settles at a
/// positive value with finite positive limit energy.
pub fn end_barrier_sweep(m: &ModelManifold, p: f64, r0: f64, radii: &[f64], n: usize) -> Result<BarrierSweep> {
    if radii.len() < 2 {
        return Err(invalid("a sweep needs at least two radii"));
    }
    if radii.iter().any(|r| !(*r > r0)) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("radii must increase and exceed R0"));
    }
    m.check(r0)?;
    for r in radii {
        m.check(*r)?;
    }
    let integral_test = m.classify_end(p, Direction::Plus)?;
    let probe = r0 + 1.0;
    let mut barriers = Vec::with_capacity(radii.len());
    let mut deviations = Vec::with_capacity(radii.len());
    for &r in radii {
        let total = m.radial_resistance(p, r0, r)?;
        let right = probe.min(r);
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(m, r0, right, n)?));
        let prof = PHarmonicRadial { manifold: m.clone(), p, anchor: r0, c0: 1.0, c1: -1.0 / total };
        let field = DiscreteField::from_radial(&grid, Arc::new(prof))?;
        let dev = field.values().iter().fold(0.0f64, |acc, u| acc.max(1.0 - u));
        deviations.push(dev);
        barriers.push(field);
    }
    let tail = m.radial_resistance(p, r0, f64::INFINITY).unwrap_or(f64::INFINITY);
    let limit_energy = if tail.is_finite() { tail.powf(1.0 - p) } else { 0.0 };
    let last = deviations[deviations.len() - 1];
    let prev = deviations[deviations.len() - 2];
    let diagnosis = if last < 1e-3 {
        EndType::Parabolic
    } else if (last - prev).abs() <= 1e-3 * last && limit_energy > 0.0 && limit_energy.is_finite() {
        EndType::Hyperbolic
    } else {
        return Err(Error::InternalInconsistency("barrier deviations neither vanish nor settle; extend the radius range".into()));
    };
    if diagnosis != integral_test {
        return Err(Error::InternalInconsistency("barrier limit disagrees with the integral test".into()));
    }
    Ok(BarrierSweep { barriers, radii: radii.to_vec(), deviations, limit_energy, diagnosis, integral_test })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub r: f64,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailProfile {
    pub rows: Vec<TailRow>,
    /// Fitted constant of the bound at the smallest radius.
    pub constant: f64,
    /// Largest slope of `ln(tail)` between consecutive radii.
    pub slope: f64,
    /// `-λ_p^{1/p}/(p+1)`.
    pub slope_bound: f64,
    pub monotone: bool,
    pub pass: bool,
}

/// Tail energy `∫_{t > R} |∇w|^p dv` of the limit barrier `w = 1 - Φ(R0,t)/Φ(R0,∞)`
/// against `C₃ R^p exp(-λ_p^{1/p}(R-1)/(p+1))`.
pub fn tail_energy_profile(m: &ModelManifold, p: f64, r0: f64, lambda_p: f64, radii: &[f64]) -> Result<TailProfile> {
    if radii.len() < 2 {
        return Err(invalid("tail profile needs at least two radii"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] < r0 {
        return Err(invalid("radii must increase and be at least R0"));
    }
    if !(lambda_p >= 0.0) {
        return Err(invalid("lambda_p must be non-negative"));
    }
    if !m.domain().unbounded(Direction::Plus) {
        return Err(invalid("tail energies need an unbounded end"));
    }
    for r in radii {
        m.check(*r)?;
    }
    if m.classify_end(p, Direction::Plus)? == EndType::Parabolic {
        return Err(Error::Unsupported("tail energy of a p-parabolic end".into()));
    }
    let total = m.radial_resistance(p, r0, f64::INFINITY)?;
    // |w'|^p A = Φ(∞)^{-p} A^{-1/(p-1)}, so the tail is Φ(R, ∞)/Φ(R0, ∞)^p.
    let tails = radii.iter().map(|&r| Ok(m.radial_resistance(p, r, f64::INFINITY)? / total.powf(p))).collect::<Result<Vec<f64>>>()?;
    let rate = lambda_p.powf(1.0 / p) / (p + 1.0);
    let shape = |r: f64| r.powf(p) * (-rate * (r - 1.0)).exp();
    let constant = tails[0] / shape(radii[0]);
    let rows: Vec<TailRow> = radii
        .iter()
        .zip(&tails)
        .map(|(&r, &t)| {
            let bound = constant * shape(r);
            TailRow { r, measured: t, bound, pass: t <= bound * (1.0 + 1e-10) }
        })
        .collect();
    let slope = radii
        .windows(2)
        .zip(tails.windows(2))
        .map(|(r, t)| (t[1].ln() - t[0].ln()) / (r[1] - r[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    let slope_bound = -rate;
    let monotone = tails.windows(2).all(|w| w[1] <= w[0]);
    let pass = rows.iter().all(|r| r.pass) && slope <= slope_bound + 1e-12 && monotone;
    Ok(TailProfile { rows, constant, slope, slope_bound, monotone, pass })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRow {
    pub r: f64,
    /// Shell volume `V(R+1) - V(R)` (hyperbolic) or tail volume `V(t > R)` (parabolic).
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeReport {
    pub end: EndType,
    pub rows: Vec<VolumeRow>,
    pub constant: f64,
    /// `false` when nothing is asserted (parabolic end with `λ_p = 0`).
    pub asserted: bool,
    pub pass: bool,
}

/// Hyperbolic ends: `V(R+1) - V(R) ≥ C R^{-p(p-1)} exp((p-1)λ_p^{1/p}(R-1)/(p+1))`.
/// Parabolic ends with `λ_p > 0`: `V(t > R) ≤ C R^p exp(-λ_p^{1/p}(R-1)/(p+1))`.
/// `C` is fitted at the smallest radius.
pub fn volume_growth_check(m: &ModelManifold, p: f64, lambda_p: f64, radii: &[f64]) -> Result<VolumeReport> {
    if radii.len() < 2 {
        return Err(invalid("volume check needs at least two radii"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("radii must increase"));
    }
    if !(lambda_p >= 0.0) {
        return Err(invalid("lambda_p must be non-negative"));
    }
    let end = m.classify_end(p, Direction::Plus)?;
    let root = lambda_p.powf(1.0 / p);
    match end {
        EndType::Hyperbolic => {
            let shape = |r: f64| r.powf(-p * (p - 1.0)) * ((p - 1.0) * root * (r - 1.0) / (p + 1.0)).exp();
            let shells = radii.iter().map(|&r| m.volume_between(r, r + 1.0)).collect::<Result<Vec<_>>>()?;
            let constant = shells[0] / shape(radii[0]);
            let rows: Vec<VolumeRow> = radii
                .iter()
                .zip(&shells)
                .map(|(&r, &v)| {
                    let bound = constant * shape(r);
                    VolumeRow { r, measured: v, bound, pass: v >= bound * (1.0 - 1e-10) }
                })
                .collect();
            let pass = rows.iter().all(|r| r.pass);
            Ok(VolumeReport { end, rows, constant, asserted: true, pass })
        }
        EndType::Parabolic => {
            let asserted = lambda_p > 0.0;
            let shape = |r: f64| r.powf(p) * (-root * (r - 1.0) / (p + 1.0)).exp();
            let tails = radii.iter().map(|&r| m.volume_between(r, f64::INFINITY)).collect::<Result<Vec<_>>>()?;
            let constant = tails[0] / shape(radii[0]);
            let rows: Vec<VolumeRow> = radii
                .iter()
                .zip(&tails)
                .map(|(&r, &v)| {
                    let bound = constant * shape(r);
                    VolumeRow { r, measured: v, bound, pass: !asserted || v <= bound * (1.0 + 1e-10) }
                })
                .collect();
            let pass = rows.iter().all(|r| r.pass);
            Ok(VolumeReport { end, rows, constant, asserted, pass })
        }
    }
}

/// `λ_p ≥ (2√λ₂ / p)^p`, valid for `p ≥ 2`.
pub fn p_poincare_bound(lambda2: f64, p: f64) -> Result<f64> {
    if !(lambda2 >= 0.0) || !lambda2.is_finite() {
        return Err(invalid("lambda_2 must be finite and non-negative"));
    }
    if !(p >= 2.0) {
        return Err(Error::Unsupported("the p-Poincare relation is only available for p >= 2".into()));
    }
    Ok((2.0 * lambda2.sqrt() / p).powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpFunction;
    use approx::assert_relative_eq;
    use core::f64::consts::{E, PI};

    fn full(m: u32, w: WarpFunction) -> ModelManifold {
        ModelManifold::warped_product(m, w, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        assert_relative_eq!(capacity_analytic(&e3, 2.0, 1.0, 2.0).unwrap().value, 8.0 * PI, max_relative = 1e-13);
        let e2 = ModelManifold::radial_euclidean(2, 0.0, f64::INFINITY).unwrap();
        assert_relative_eq!(capacity_analytic(&e2, 2.0, 1.0, E).unwrap().value, 2.0 * PI, max_relative = 1e-13);
        let w = full(3, WarpFunction::PolyEven { alpha: 2.0 });
        assert_relative_eq!(capacity_analytic(&w, 3.0, -1.0, 1.0).unwrap().value, (PI / 2.0).powi(-2), max_relative = 1e-13);
        assert!(capacity_analytic(&w, 3.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn numeric_matches_analytic_in_1d() {
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&e3, 1.0, 2.0, 257).unwrap()));
        let c = capacity_numeric(&grid, 2.0, &Condenser::interval(&grid).unwrap(), &SolveConfig::default()).unwrap();
        assert_relative_eq!(c.value, 8.0 * PI, max_relative = 1e-2);
        let same = Condenser::interval(&grid).unwrap().with_values(1.0, 1.0);
        assert_eq!(capacity_numeric(&grid, 3.0, &same, &SolveConfig::default()).unwrap().value, 0.0);
    }

    #[test]
    fn monotonicity_examples() {
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        let r = capacity_monotonicity_suite(&e3, 2.0, 1.0, &[2.0, 4.0, 8.0, 100.0], &[1.0, 1.5, 1.9], 2.0).unwrap();
        assert!(r.ok, "{r:?}");
        assert_relative_eq!(r.exhaustion_limit.unwrap(), 4.0 * PI, max_relative = 1e-12);
        let r = capacity_monotonicity_suite(&e3, 4.0, 1.0, &[2.0, 4.0, 8.0, 100.0], &[1.0, 1.5], 2.0).unwrap();
        assert!(r.ok && r.exhaustion_limit == Some(0.0));
    }

    #[test]
    fn sweep_examples() {
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        let radii: Vec<f64> = (1..=30).map(|k| 10f64.powi(10 * k + 7)).collect();
        let s = end_barrier_sweep(&e3, 3.0, 1.0, &radii, 33).unwrap();
        assert_eq!(s.diagnosis, EndType::Parabolic);
        let s = end_barrier_sweep(&e3, 2.0, 1.0, &radii, 33).unwrap();
        assert_eq!(s.diagnosis, EndType::Hyperbolic);
        assert_relative_eq!(s.limit_energy, 4.0 * PI, max_relative = 1e-12);
        let ex = full(2, WarpFunction::Exponential { beta: 1.0 });
        let s = end_barrier_sweep(&ex, 2.0, 0.0, &[10.0, 50.0, 100.0], 33).unwrap();
        assert_eq!(s.diagnosis, EndType::Hyperbolic);
        // The limit barrier is e^{-t}.
        let last = s.barriers.last().unwrap();
        for (k, v) in last.values().iter().enumerate() {
            assert_relative_eq!(*v, (-last.grid().point(k).0).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn tail_examples() {
        let ex = full(2, WarpFunction::Exponential { beta: 1.0 });
        let radii: Vec<f64> = (2..=10).map(f64::from).collect();
        let t = tail_energy_profile(&ex, 2.0, 0.0, 0.25, &radii).unwrap();
        for row in &t.rows {
            assert_relative_eq!(row.measured, (-row.r).exp(), max_relative = 1e-10);
        }
        assert_relative_eq!(t.slope, -1.0, max_relative = 1e-8);
        assert!(t.pass);
        let e3 = ModelManifold::radial_euclidean(3, 1.0, f64::INFINITY).unwrap();
        let t = tail_energy_profile(&e3, 2.0, 1.0, 0.0, &radii).unwrap();
        for row in &t.rows {
            assert_relative_eq!(row.measured, 4.0 * PI / row.r, max_relative = 1e-10);
        }
        assert!(t.pass);
        let short = ModelManifold::radial_euclidean(3, 1.0, 5.0).unwrap();
        assert!(tail_energy_profile(&short, 2.0, 1.0, 0.0, &radii).is_err());
    }

    #[test]
    fn volume_examples() {
        let ex = full(2, WarpFunction::Exponential { beta: 1.0 });
        let radii: Vec<f64> = (2..=10).map(f64::from).collect();
        let v = volume_growth_check(&ex, 2.0, 0.25, &radii).unwrap();
        assert!(v.pass);
        for row in &v.rows {
            assert_relative_eq!(row.measured, row.r.exp() * (E - 1.0), max_relative = 1e-10);
        }
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        assert!(volume_growth_check(&e3, 2.0, 0.0, &radii).unwrap().pass);
        assert!(volume_growth_check(&e3, 2.0, 0.0, &[3.0]).is_err());
    }

    #[test]
    fn poincare_examples() {
        assert_relative_eq!(p_poincare_bound(1.0, 4.0).unwrap(), 0.0625, max_relative = 1e-15);
        assert_eq!(p_poincare_bound(0.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(p_poincare_bound(0.25, 2.0).unwrap(), 0.25, max_relative = 1e-15);
        assert!(matches!(p_poincare_bound(1.0, 1.5), Err(Error::Unsupported(_))));
    }
}
