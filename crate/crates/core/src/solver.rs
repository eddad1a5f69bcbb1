//! Damped Newton for the Dirichlet problem of `Δ_{p,ε} u = 0`, ε-continuation,
//! and closed-form radial p-harmonic fields on model manifolds.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::energy::{energy, energy_gradient, energy_of, hessian_apply, hessian_diagonal, hessian_tridiagonal, EnergySpec};
use crate::error::{invalid, Error, Result};
use crate::field::{DiscreteField, RadialProfile};
use crate::geometry::{Direction, EndType, ModelManifold};
use crate::grid::{wp_distance, Grid, Grid1D};
use crate::linalg::{conjugate_gradient, dot, solve_tridiagonal};
use crate::quadrature::{self, QuadOptions};

/// Smallest ε a Newton solve accepts.
pub const EPS_FLOOR: f64 = 1e-14;

/// `ε_k = ε₀ 2^{-k}`, `k = 0..steps`.
pub fn geometric_schedule(eps0: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| eps0 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub eps_schedule: Vec<f64>,
    /// Max-norm tolerance on the residual at free nodes.
    pub residual_tol: f64,
    pub max_newton_iters: usize,
    pub backtrack: f64,
    pub armijo: f64,
    pub cg_rel_tol: f64,
    pub max_cg_iters: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            eps_schedule: geometric_schedule(1.0, 20),
            residual_tol: 1e-10,
            max_newton_iters: 50,
            backtrack: 0.5,
            armijo: 1e-4,
            cg_rel_tol: 1e-12,
            max_cg_iters: 20_000,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_schedule.is_empty() {
            return Err(invalid("empty epsilon schedule"));
        }
        if self.eps_schedule.iter().any(|e| !(*e >= EPS_FLOOR) || !e.is_finite()) {
            return Err(invalid("schedule entries must be finite and at least 1e-14"));
        }
        if self.eps_schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid("epsilon schedule must be strictly decreasing"));
        }
        if !(self.residual_tol > 0.0) || !(self.cg_rel_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(invalid("line-search constants must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// A node predicate `(x, y) -> bool` and the value it fixes.
pub type Region<'a> = (&'a dyn Fn(f64, f64) -> bool, f64);

/// Dirichlet data: a prescribed value for some nodes, free elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Dirichlet {
    values: Vec<Option<f64>>,
}

impl Dirichlet {
    pub fn new(values: Vec<Option<f64>>) -> Result<Self> {
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("boundary values must be finite"));
        }
        if values.iter().all(Option::is_none) {
            return Err(invalid("at least one node must carry a boundary value"));
        }
        Ok(Self { values })
    }

    /// `u(t_0) = ua`, `u(t_n) = ub` on a 1D grid.
    pub fn ends(grid: &Grid, ua: f64, ub: f64) -> Result<Self> {
        let g = grid.as_1d().ok_or_else(|| invalid("end values need a 1D grid"))?;
        let mut v = vec![None; g.len()];
        v[0] = Some(ua);
        v[g.len() - 1] = Some(ub);
        Self::new(v)
    }

    /// `u = f(x, y)` on every grid-boundary node.
    pub fn on_boundary(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let v = grid
            .boundary_mask()
            .iter()
            .enumerate()
            .map(|(k, b)| {
                b.then(|| {
                    let (x, y) = grid.point(k);
                    f(x, y)
                })
            })
            .collect();
        Self::new(v)
    }

    /// Nodes selected by each predicate are fixed to the paired value; later pairs win.
    pub fn from_regions(grid: &Grid, regions: &[Region<'_>]) -> Result<Self> {
        let mut v = vec![None; grid.len()];
        for (k, slot) in v.iter_mut().enumerate() {
            let (x, y) = grid.point(k);
            for (pred, val) in regions {
                if pred(x, y) {
                    *slot = Some(*val);
                }
            }
        }
        Self::new(v)
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn fixed_mask(&self) -> Vec<bool> {
        self.values.iter().map(Option::is_some).collect()
    }

    fn check_len(&self, grid: &Grid) -> Result<()> {
        if self.values.len() != grid.len() {
            return Err(invalid("boundary data does not match the grid"));
        }
        Ok(())
    }

    fn impose(&self, u: &mut [f64]) {
        for (ui, v) in u.iter_mut().zip(&self.values) {
            if let Some(v) = v {
                *ui = *v;
            }
        }
    }

    fn constant_value(&self) -> Option<f64> {
        let mut it = self.values.iter().flatten();
        let first = *it.next()?;
        it.all(|v| *v == first).then_some(first)
    }
}

/// Four-term chain `E_p(u) ≤ E_p(u_ε) ≤ E_{p,ε}(u_ε) ≤ E_{p,ε}(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub e_p_u: f64,
    pub e_p_ueps: f64,
    pub e_peps_ueps: f64,
    pub e_peps_u: f64,
    pub tol: f64,
    pub holds: [bool; 3],
    pub ok: bool,
}

/// One Newton run at fixed ε.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub eps: f64,
    pub iterations: usize,
    pub residual: f64,
    pub energy_eps: f64,
    pub energy_p: f64,
    pub energy_history: Vec<f64>,
    /// `‖u_{ε_k} - u_final‖_{W^{1,p}}`, where `u_final` is the last iterate or
    /// an attached reference.
    pub w1p_dist_to_final: Option<f64>,
    /// `‖u_{ε_k} - u_{ε_{k+1}}‖_{W^{1,p}}`.
    pub w1p_dist_to_next: Option<f64>,
    pub sandwich: Option<SandwichReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub p: f64,
    pub steps: Vec<StepReport>,
}

impl SolveReport {
    /// Distances to the final iterate are non-increasing up to the relative `slack`.
    pub fn distances_monotone(&self, slack: f64) -> bool {
        let d: Vec<f64> = self.steps.iter().filter_map(|s| s.w1p_dist_to_final).collect();
        d.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
    }

    pub fn sandwich_ok(&self) -> bool {
        self.steps.iter().all(|s| s.sandwich.as_ref().is_none_or(|r| r.ok))
    }

    /// Recomputes distances and sandwich chains against `reference` (e.g. a
    /// solve at `ε = 10⁻¹⁴`) instead of the last iterate.
    pub fn attach_reference(&mut self, fields: &[DiscreteField], reference: &DiscreteField) -> Result<()> {
        if fields.len() != self.steps.len() {
            return Err(invalid("field count does not match the report"));
        }
        for (s, f) in self.steps.iter_mut().zip(fields) {
            s.w1p_dist_to_final = Some(wp_distance(f, reference, self.p)?);
            s.sandwich = Some(sandwich_check(self.p, s.eps, reference, f)?);
        }
        Ok(())
    }
}

/// Verifies `E_p(u) ≤ E_p(u_ε) ≤ E_{p,ε}(u_ε) ≤ E_{p,ε}(u)` with tolerance `10⁻⁸ (1 + scale)`.
pub fn sandwich_check(p: f64, eps: f64, u: &DiscreteField, u_eps: &DiscreteField) -> Result<SandwichReport> {
    if !u.same_grid(u_eps) {
        return Err(invalid("fields live on different grids"));
    }
    for ((a, b), on) in u.values().iter().zip(u_eps.values()).zip(u.grid().boundary_mask()) {
        if on && (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
            return Err(invalid("boundary values differ"));
        }
    }
    let raw = EnergySpec::raw(p)?;
    let reg = EnergySpec::new(p, eps)?;
    let e = [energy(&raw, u), energy(&raw, u_eps), energy(&reg, u_eps), energy(&reg, u)];
    let scale = e.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let tol = 1e-8 * (1.0 + scale);
    let holds = [e[0] <= e[1] + tol, e[1] <= e[2] + tol, e[2] <= e[3] + tol];
    Ok(SandwichReport {
        e_p_u: e[0],
        e_p_ueps: e[1],
        e_peps_ueps: e[2],
        e_peps_u: e[3],
        tol,
        holds,
        ok: holds.iter().all(|h| *h),
    })
}

fn max_abs_free(g: &[f64], fixed: &[bool]) -> f64 {
    g.iter().zip(fixed).filter(|(_, f)| !**f).fold(0.0, |m, (x, _)| m.max(x.abs()))
}

/// Newton direction `H d = -g` restricted to free nodes.
fn newton_direction(spec: &EnergySpec, grid: &Grid, u: &[f64], g: &[f64], fixed: &[bool], cfg: &SolveConfig) -> Vec<f64> {
    let rhs: Vec<f64> = g.iter().zip(fixed).map(|(x, f)| if *f { 0.0 } else { -x }).collect();
    match grid {
        Grid::D1(_) => {
            let (mut sub, mut diag, mut sup) = hessian_tridiagonal(spec, grid, u);
            for (i, f) in fixed.iter().enumerate() {
                if *f {
                    sub[i] = 0.0;
                    sup[i] = 0.0;
                    diag[i] = 1.0;
                }
            }
            // Free rows next to a fixed node must not see its (zero) update.
            solve_tridiagonal(&sub, &diag, &sup, &rhs)
        }
        Grid::D2(_) => {
            let mut diag = hessian_diagonal(spec, grid, u);
            for (d, f) in diag.iter_mut().zip(fixed) {
                if *f {
                    *d = 1.0;
                }
            }
            let n = u.len();
            let apply = |v: &[f64], out: &mut [f64]| {
                let mut masked = v.to_vec();
                for (m, f) in masked.iter_mut().zip(fixed) {
                    if *f {
                        *m = 0.0;
                    }
                }
                hessian_apply(spec, grid, u, &masked, out);
                for i in 0..n {
                    if fixed[i] {
                        out[i] = v[i];
                    }
                }
            };
            conjugate_gradient(apply, &diag, &rhs, cfg.cg_rel_tol, cfg.max_cg_iters).x
        }
    }
}

struct NewtonOutcome {
    u: Vec<f64>,
    iterations: usize,
    residual: f64,
    history: Vec<f64>,
}

fn newton(spec: &EnergySpec, grid: &Arc<Grid>, bc: &Dirichlet, mut u: Vec<f64>, cfg: &SolveConfig) -> Result<NewtonOutcome> {
    let fixed = bc.fixed_mask();
    bc.impose(&mut u);
    let mut e = energy_of(spec, grid, &u);
    let mut history = vec![e];
    let mut it = 0;
    loop {
        let mut g = energy_gradient(spec, grid, &u)?;
        for (gi, f) in g.iter_mut().zip(&fixed) {
            if *f {
                *gi = 0.0;
            }
        }
        let res = max_abs_free(&g, &fixed);
        if !res.is_finite() {
            return Err(Error::NonConvergence { eps: spec.eps, iterations: it, residual: res, best: Box::new(DiscreteField::new(grid, u)?) });
        }
        if res <= cfg.residual_tol {
            return Ok(NewtonOutcome { u, iterations: it, residual: res, history });
        }
        if it == cfg.max_newton_iters {
            return Err(Error::NonConvergence { eps: spec.eps, iterations: it, residual: res, best: Box::new(DiscreteField::new(grid, u)?) });
        }
        let mut d = newton_direction(spec, grid, &u, &g, &fixed, cfg);
        // On fine grids the residual can bottom out above `residual_tol`; a
        // Newton correction of a few ulps means the iterate no longer moves.
        let size = u.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if res <= 1e3 * cfg.residual_tol && d.iter().all(|x| x.abs() <= 100.0 * f64::EPSILON * size) {
            return Ok(NewtonOutcome { u, iterations: it, residual: res, history });
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) || d.iter().any(|x| !x.is_finite()) {
            let diag = hessian_diagonal(spec, grid, &u);
            d = g.iter().zip(&diag).zip(&fixed).map(|((gi, di), f)| if *f { 0.0 } else { -gi / di.max(f64::MIN_POSITIVE) }).collect();
            slope = dot(&g, &d);
        }
        // Energies of nearby iterates agree to roundoff once the residual is small.
        let slack = 64.0 * f64::EPSILON * e.abs();
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-14 {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let et = energy_of(spec, grid, &trial);
            if et <= e + cfg.armijo * alpha * slope + slack {
                accepted = Some((trial, et));
                break;
            }
            alpha *= cfg.backtrack;
        }
        let Some((trial, et)) = accepted else {
            return Err(Error::NonConvergence { eps: spec.eps, iterations: it, residual: res, best: Box::new(DiscreteField::new(grid, u)?) });
        };
        u = trial;
        e = et;
        history.push(e);
        it += 1;
    }
}

/// Harmonic (`p = 2`) field with the given boundary data.
fn harmonic_guess(grid: &Arc<Grid>, bc: &Dirichlet, cfg: &SolveConfig) -> Result<Vec<f64>> {
    let fixed: Vec<f64> = bc.values.iter().flatten().copied().collect();
    if let Some(c) = bc.constant_value() {
        return Ok(vec![c; grid.len()]);
    }
    let mean = fixed.iter().sum::<f64>() / fixed.len() as f64;
    let mut u = vec![mean; grid.len()];
    bc.impose(&mut u);
    let spec = EnergySpec { p: 2.0, eps: 1.0 };
    let mut g = energy_gradient(&spec, grid, &u)?;
    let mask = bc.fixed_mask();
    for (gi, f) in g.iter_mut().zip(&mask) {
        if *f {
            *gi = 0.0;
        }
    }
    let d = newton_direction(&spec, grid, &u, &g, &mask, cfg);
    for (ui, di) in u.iter_mut().zip(&d) {
        *ui += di;
    }
    bc.impose(&mut u);
    Ok(u)
}

fn step_report(p: f64, spec: &EnergySpec, field: &DiscreteField, out: &NewtonOutcome) -> Result<StepReport> {
    Ok(StepReport {
        eps: spec.eps,
        iterations: out.iterations,
        residual: out.residual,
        energy_eps: energy(spec, field),
        energy_p: energy(&EnergySpec::raw(p)?, field),
        energy_history: out.history.clone(),
        w1p_dist_to_final: None,
        w1p_dist_to_next: None,
        sandwich: None,
    })
}

fn check_spec(spec: &EnergySpec) -> Result<()> {
    EnergySpec::new(spec.p, spec.eps)?;
    if spec.eps < EPS_FLOOR {
        return Err(invalid("Newton solves need epsilon >= 1e-14"));
    }
    Ok(())
}

/// Minimizes `E_{p,ε}` over fields with the given Dirichlet data, starting
/// from the harmonic field.
pub fn solve_dirichlet(spec: &EnergySpec, grid: &Arc<Grid>, bc: &Dirichlet, cfg: &SolveConfig) -> Result<(DiscreteField, SolveReport)> {
    let guess = harmonic_guess(grid, bc, cfg)?;
    solve_from(spec, grid, bc, guess, cfg)
}

/// As [`solve_dirichlet`], from a given initial field.
pub fn solve_from(spec: &EnergySpec, grid: &Arc<Grid>, bc: &Dirichlet, initial: Vec<f64>, cfg: &SolveConfig) -> Result<(DiscreteField, SolveReport)> {
    check_spec(spec)?;
    cfg.validate()?;
    bc.check_len(grid)?;
    if initial.len() != grid.len() {
        return Err(invalid("initial field does not match the grid"));
    }
    let out = newton(spec, grid, bc, initial, cfg)?;
    let field = DiscreteField::new(grid, out.u.clone())?;
    let step = step_report(spec.p, spec, &field, &out)?;
    Ok((field, SolveReport { p: spec.p, steps: vec![step] }))
}

/// Solves along `cfg.eps_schedule`, warm-starting each ε from the previous solution.
pub fn epsilon_continuation(p: f64, grid: &Arc<Grid>, bc: &Dirichlet, cfg: &SolveConfig) -> Result<(Vec<DiscreteField>, SolveReport)> {
    cfg.validate()?;
    bc.check_len(grid)?;
    EnergySpec::raw(p)?;
    let mut u = harmonic_guess(grid, bc, cfg)?;
    let mut fields = Vec::with_capacity(cfg.eps_schedule.len());
    let mut steps = Vec::with_capacity(cfg.eps_schedule.len());
    for &eps in &cfg.eps_schedule {
        let spec = EnergySpec::new(p, eps)?;
        let out = newton(&spec, grid, bc, u, cfg)?;
        let field = DiscreteField::new(grid, out.u.clone())?;
        steps.push(step_report(p, &spec, &field, &out)?);
        u = out.u;
        fields.push(field);
    }
    let last = fields.len() - 1;
    for k in 0..fields.len() {
        steps[k].w1p_dist_to_final = Some(wp_distance(&fields[k], &fields[last], p)?);
        if k < last {
            steps[k].w1p_dist_to_next = Some(wp_distance(&fields[k], &fields[k + 1], p)?);
        }
        steps[k].sandwich = Some(sandwich_check(p, steps[k].eps, &fields[last], &fields[k])?);
    }
    Ok((fields, SolveReport { p, steps }))
}

/// `u(t) = c0 + c1 Φ(t)`, `Φ(t) = ∫_{anchor}^t A^{-1/(p-1)} ds`: the radial
/// p-harmonic functions of a model manifold. `anchor` may be `-∞`.
#[derive(Clone, Debug)]
pub struct PHarmonicRadial {
    pub manifold: ModelManifold,
    pub p: f64,
    pub anchor: f64,
    pub c0: f64,
    pub c1: f64,
}

impl PHarmonicRadial {
    pub fn phi(&self, t: f64) -> f64 {
        if t == self.anchor {
            0.0
        } else if t > self.anchor {
            self.manifold.radial_resistance(self.p, self.anchor, t).unwrap_or(f64::NAN)
        } else {
            -self.manifold.radial_resistance(self.p, t, self.anchor).unwrap_or(f64::NAN)
        }
    }
}

impl RadialProfile for PHarmonicRadial {
    fn jet(&self, t: f64) -> [f64; 4] {
        let k = 1.0 / (self.p - 1.0);
        let g = self.manifold.inv_area_root(t, self.p);
        let l1 = self.manifold.log_area_d1(t);
        let l2 = self.manifold.log_area_d2(t);
        let g1 = -k * g * l1;
        let g2 = -k * (g1 * l1 + g * l2);
        [self.c0 + self.c1 * self.phi(t), self.c1 * g, self.c1 * g1, self.c1 * g2]
    }
}

/// Radial solution of `Δ_{p,ε} u = 0`: `A (u'² + ε)^{(p-2)/2} u' = flux`,
/// with `u(anchor) = value_at_anchor`.
#[derive(Clone, Debug)]
pub struct RadialEpsHarmonic {
    pub manifold: ModelManifold,
    pub p: f64,
    pub eps: f64,
    pub flux: f64,
    pub anchor: f64,
    pub value_at_anchor: f64,
}

impl RadialEpsHarmonic {
    /// `G(g) = (g² + ε)^{(p-2)/2} g` and its first two derivatives.
    fn g_fun(&self, g: f64) -> [f64; 3] {
        let (p, e) = (self.p, self.eps);
        let s = g * g + e;
        let g0 = s.powf(0.5 * p - 1.0) * g;
        let g1 = s.powf(0.5 * p - 2.0) * ((p - 1.0) * g * g + e);
        let g2 = (p - 4.0) * g * s.powf(0.5 * p - 3.0) * ((p - 1.0) * g * g + e) + s.powf(0.5 * p - 2.0) * 2.0 * (p - 1.0) * g;
        [g0, g1, g2]
    }

    /// Solves `G(g) = y` (G is odd and strictly increasing).
    fn slope(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let target = y.abs();
        let mut hi = target.powf(1.0 / (self.p - 1.0)).max(1e-300);
        while self.g_fun(hi)[0] < target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        let mut g = hi;
        for _ in 0..200 {
            let [v, d, _] = self.g_fun(g);
            let r = v - target;
            if r > 0.0 {
                hi = g;
            } else {
                lo = g;
            }
            let mut next = g - r / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - g).abs() <= 1e-16 * g {
                g = next;
                break;
            }
            g = next;
        }
        g.copysign(y)
    }

    fn derivatives(&self, t: f64) -> [f64; 3] {
        let a_log = self.manifold.log_area_unchecked(t);
        let y = self.flux * (-a_log).exp();
        let g = self.slope(y);
        let [_, d1, d2] = self.g_fun(g);
        let l1 = self.manifold.log_area_d1(t);
        let l2 = self.manifold.log_area_d2(t);
        // G'(u') u'' = -y L1, differentiated once more for u'''.
        let r = -y * l1;
        let r1 = -y * (l2 - l1 * l1);
        let u2 = r / d1;
        let u3 = (r1 - d2 * u2 * u2) / d1;
        [g, u2, u3]
    }
}

impl RadialProfile for RadialEpsHarmonic {
    fn jet(&self, t: f64) -> [f64; 4] {
        let [u1, u2, u3] = self.derivatives(t);
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 2000 };
        let v = if t == self.anchor {
            0.0
        } else {
            quadrature::integrate(|s| self.derivatives(s)[0], self.anchor, t, opts).map_or(f64::NAN, |e| e.value)
        };
        [self.value_at_anchor + v, u1, u2, u3]
    }
}

/// Exact radial p-harmonic field on `[a, b]` with `u(a) = ua`, `u(b) = ub`,
/// sampled on a uniform grid of `n` nodes.
pub fn radial_p_harmonic(m: &ModelManifold, p: f64, a: f64, b: f64, ua: f64, ub: f64, n: usize) -> Result<DiscreteField> {
    if !(a < b) {
        return Err(invalid("need a < b"));
    }
    let grid = Arc::new(Grid::from(Grid1D::on_manifold(m, a, b, n)?));
    radial_p_harmonic_on(&grid, p, ua, ub)
}

/// As [`radial_p_harmonic`] on an existing 1D manifold grid spanning `[a, b]`.
pub fn radial_p_harmonic_on(grid: &Arc<Grid>, p: f64, ua: f64, ub: f64) -> Result<DiscreteField> {
    EnergySpec::raw(p)?;
    let g = grid.as_1d().ok_or_else(|| invalid("radial fields need a 1D grid"))?;
    let m = g.manifold().ok_or_else(|| invalid("radial fields need a manifold grid"))?;
    let (a, b) = (g.nodes()[0], g.nodes()[g.len() - 1]);
    let total = m.radial_resistance(p, a, b)?;
    let prof = PHarmonicRadial { manifold: m.clone(), p, anchor: a, c0: ua, c1: (ub - ua) / total };
    DiscreteField::from_radial(grid, Arc::new(prof))
}

/// Barrier `h = Φ/Φ(∞)` between the two ends of a full-line model manifold.
#[derive(Clone, Debug)]
pub struct BarrierResult {
    pub field: DiscreteField,
    pub sup: f64,
    pub inf: f64,
    /// `0 < h < 1` at every node.
    pub strictly_between: bool,
    /// `E_p(h)` on the grid.
    pub energy: f64,
    /// `Φ(∞)^{1-p}`.
    pub energy_exact: f64,
    pub phi_total: f64,
}

/// Two-end barrier `h(t) = Φ(t)/Φ(+∞)`, `Φ(t) = ∫_{-∞}^t A^{-1/(p-1)}`,
/// sampled on a sinh-graded grid over `[-half_width, half_width]`.
pub fn two_end_barrier(m: &ModelManifold, p: f64, half_width: f64, n: usize) -> Result<BarrierResult> {
    EnergySpec::raw(p)?;
    let d = m.domain();
    if d.lo != f64::NEG_INFINITY || d.hi != f64::INFINITY {
        return Err(invalid("two-end barriers need a full-line domain"));
    }
    for dir in [Direction::Plus, Direction::Minus] {
        if m.classify_end(p, dir)? == EndType::Parabolic {
            return Err(Error::NoBarrier(match dir {
                Direction::Plus => "the end at +inf is p-parabolic",
                Direction::Minus => "the end at -inf is p-parabolic",
            }));
        }
    }
    let phi_total = m.radial_resistance(p, f64::NEG_INFINITY, f64::INFINITY)?;
    let grid = Arc::new(Grid::from(Grid1D::sinh_graded(Some(m), 0.0, half_width, n, half_width.asinh().max(1.0))?));
    let prof = PHarmonicRadial { manifold: m.clone(), p, anchor: f64::NEG_INFINITY, c0: 0.0, c1: 1.0 / phi_total };
    let field = DiscreteField::from_radial(&grid, Arc::new(prof))?;
    let v = field.values();
    let sup = v.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let inf = v.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let strictly_between = v.iter().all(|h| *h > 0.0 && *h < 1.0);
    let energy = energy(&EnergySpec::raw(p)?, &field);
    Ok(BarrierResult { field, sup, inf, strictly_between, energy, energy_exact: phi_total.powf(1.0 - p), phi_total })
}

impl core::fmt::Display for SandwichReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:.6e} <= {:.6e} <= {:.6e} <= {:.6e}", self.e_p_u, self.e_p_ueps, self.e_peps_ueps, self.e_peps_u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpFunction;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn euclid3() -> ModelManifold {
        ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap()
    }

    fn poly2() -> ModelManifold {
        ModelManifold::warped_product(3, WarpFunction::PolyEven { alpha: 2.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn harmonic_solve_matches_closed_form() {
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&euclid3(), 1.0, 2.0, 401).unwrap()));
        let bc = Dirichlet::ends(&grid, 1.0, 0.0).unwrap();
        let (u, rep) = solve_dirichlet(&EnergySpec::new(2.0, 1.0).unwrap(), &grid, &bc, &SolveConfig::default()).unwrap();
        let exact: Vec<f64> = grid.as_1d().unwrap().nodes().iter().map(|t| 2.0 / t - 1.0).collect();
        assert!(max_diff(u.values(), &exact) < 1e-5);
        assert!(rep.steps[0].residual <= 1e-10);
    }

    #[test]
    fn constant_data_needs_no_iterations() {
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&euclid3(), 1.0, 2.0, 33).unwrap()));
        let bc = Dirichlet::ends(&grid, 0.7, 0.7).unwrap();
        let (u, rep) = solve_dirichlet(&EnergySpec::new(3.0, 0.1).unwrap(), &grid, &bc, &SolveConfig::default()).unwrap();
        assert!(u.values().iter().all(|v| *v == 0.7));
        assert_eq!(rep.steps[0].iterations, 0);
    }

    #[test]
    fn warped_p3_solve_matches_radial_oracle() {
        let m = poly2();
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&m, -10.0, 10.0, 2001).unwrap()));
        let bc = Dirichlet::ends(&grid, 0.0, 1.0).unwrap();
        let (u, _) = solve_dirichlet(&EnergySpec::new(3.0, 1e-6).unwrap(), &grid, &bc, &SolveConfig::default()).unwrap();
        let exact = radial_p_harmonic_on(&grid, 3.0, 0.0, 1.0).unwrap();
        assert!(max_diff(u.values(), exact.values()) < 1e-3);
    }

    #[test]
    fn radial_examples() {
        let u = radial_p_harmonic(&euclid3(), 2.0, 1.0, 2.0, 1.0, 0.0, 65).unwrap();
        for (k, v) in u.values().iter().enumerate() {
            let t = u.grid().point(k).0;
            assert_relative_eq!(*v, 2.0 / t - 1.0, epsilon = 1e-13);
        }
        let w = radial_p_harmonic(&poly2(), 3.0, -1.0, 1.0, 0.0, 1.0, 65).unwrap();
        for (k, v) in w.values().iter().enumerate() {
            let t = w.grid().point(k).0;
            assert_relative_eq!(*v, (t.atan() + PI / 4.0) / (PI / 2.0), epsilon = 1e-13);
        }
        let c = radial_p_harmonic(&euclid3(), 3.0, 1.0, 2.0, 0.4, 0.4, 17).unwrap();
        assert!(c.values().iter().all(|v| *v == 0.4));
        assert!(radial_p_harmonic(&euclid3(), 3.0, 2.0, 1.0, 0.0, 1.0, 17).is_err());
    }

    #[test]
    fn barrier_example() {
        let b = two_end_barrier(&poly2(), 3.0, 1e4, 4001).unwrap();
        assert_relative_eq!(b.energy_exact, PI.powi(-2), max_relative = 1e-12);
        assert_relative_eq!(b.energy, PI.powi(-2), max_relative = 5e-3);
        assert!(b.strictly_between);
        assert!((b.sup - 1.0).abs() < 1e-3 && b.inf.abs() < 1e-3);
        let g = b.field.grid().as_1d().unwrap();
        let mid = g.nearest(0.0);
        assert_relative_eq!(b.field.values()[mid], 0.5, epsilon = 1e-12);
        let e3 = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        assert!(two_end_barrier(&e3, 3.0, 10.0, 101).is_err());
        let flat = ModelManifold::warped_product(3, WarpFunction::PolyEven { alpha: 0.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
        assert!(matches!(two_end_barrier(&flat, 2.0, 10.0, 101), Err(Error::NoBarrier(_))));
    }

    #[test]
    fn eps_harmonic_profile_solves_the_flux_equation() {
        let prof = RadialEpsHarmonic { manifold: euclid3(), p: 3.0, eps: 0.01, flux: -2.0, anchor: 1.0, value_at_anchor: 1.0 };
        for t in [1.0, 1.3, 1.9] {
            let [_, u1, u2, u3] = prof.jet(t);
            let a = 4.0 * PI * t * t;
            assert_relative_eq!(a * (u1 * u1 + 0.01).sqrt() * u1, -2.0, max_relative = 1e-12);
            let h = 1e-5;
            let d = |s: f64| prof.jet(s);
            assert_relative_eq!(u2, (d(t + h)[1] - d(t - h)[1]) / (2.0 * h), max_relative = 1e-6);
            assert_relative_eq!(u3, (d(t + h)[2] - d(t - h)[2]) / (2.0 * h), max_relative = 1e-5);
            assert_relative_eq!(u1, (d(t + h)[0] - d(t - h)[0]) / (2.0 * h), max_relative = 1e-6);
        }
    }

    #[test]
    fn schedule_validation() {
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&euclid3(), 1.0, 2.0, 33).unwrap()));
        let bc = Dirichlet::ends(&grid, 1.0, 0.0).unwrap();
        let mut cfg = SolveConfig::default();
        cfg.eps_schedule.clear();
        assert!(epsilon_continuation(3.0, &grid, &bc, &cfg).is_err());
        cfg.eps_schedule = vec![0.1, 0.2];
        assert!(epsilon_continuation(3.0, &grid, &bc, &cfg).is_err());
        cfg.eps_schedule = vec![1e-15];
        assert!(epsilon_continuation(3.0, &grid, &bc, &cfg).is_err());
    }
}
