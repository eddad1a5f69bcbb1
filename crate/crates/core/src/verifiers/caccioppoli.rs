use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use super::{norm2, VerifierReport};
use crate::energy::{energy_gradient, EnergySpec};
use crate::error::{invalid, Error, Result};
use crate::field::DiscreteField;
use crate::geometry::ModelManifold;
use crate::grid::Grid;

/// Profile of the transition regions of a cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffShape {
    Linear,
    /// `3s² - 2s³`.
    Smoothstep,
    /// `(1 - cos πs)/2`.
    Cosine,
}

impl CutoffShape {
    fn ramp(self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self {
            CutoffShape::Linear => s,
            CutoffShape::Smoothstep => s * s * (3.0 - 2.0 * s),
            CutoffShape::Cosine => 0.5 * (1.0 - (PI * s).cos()),
        }
    }

    /// `0` outside `[a, d]`, rising on `[a, b]`, `1` on `[b, c]`, falling on `[c, d]`,
    /// in the first coordinate.
    pub fn field(self, grid: &alloc::sync::Arc<Grid>, a: f64, b: f64, c: f64, d: f64) -> Result<DiscreteField> {
        if !(a < b && b <= c && c < d) {
            return Err(invalid("cutoff needs a < b <= c < d"));
        }
        DiscreteField::from_fn(grid, |x, _| {
            if x <= a || x >= d {
                0.0
            } else if x < b {
                self.ramp((x - a) / (b - a))
            } else if x <= c {
                1.0
            } else {
                self.ramp((d - x) / (d - c))
            }
        })
    }
}

/// `Σ_e μ_e |F_e|^p` with `F_e = mean(a on e) · ∇b|_e`.
fn weighted_gradient_norm(grid: &Grid, a: &[f64], b: &[f64], p: f64) -> f64 {
    let mut s = 0.0;
    grid.for_each_element(|e| {
        let mean = e.idx[..e.len].iter().map(|&k| a[k]).sum::<f64>() / e.len as f64;
        let g = e.gradient(b);
        s += e.mu * (mean.abs() * norm2(g).sqrt()).powf(p);
    });
    s
}

/// `‖ψ∇w‖_{L^p} ≤ p ‖w∇ψ‖_{L^p}` for a positive p-subharmonic `w`.
///
/// Subharmonicity is taken from the analytic descriptor when present and
/// otherwise checked through the sign of the discrete energy gradient on the
/// interior of the support of `ψ`.
pub fn caccioppoli_check(w: &DiscreteField, psi: &DiscreteField, p: f64, tol: f64) -> Result<VerifierReport> {
    if !(p > 1.0) {
        return Err(invalid("p must be > 1"));
    }
    if !w.same_grid(psi) {
        return Err(invalid("fields live on different grids"));
    }
    let grid = w.grid();
    let mut support = vec![false; grid.len()];
    grid.for_each_element(|e| {
        if e.idx[..e.len].iter().any(|&k| psi.values()[k] != 0.0) {
            for &k in &e.idx[..e.len] {
                support[k] = true;
            }
        }
    });
    if support.iter().zip(w.values()).any(|(s, v)| *s && !(*v > 0.0)) {
        return Err(invalid("w must be positive on the support of the cutoff"));
    }
    if w.analytic().is_none() && support.iter().any(|s| *s) {
        let spec = EnergySpec::raw(p)?;
        let grad = energy_gradient(&spec, grid, w.values())?;
        let mut scale = vec![0.0; grid.len()];
        grid.for_each_element(|e| {
            let g = e.gradient(w.values());
            let c = e.mu * p * norm2(g).sqrt().powf(p - 1.0);
            for k in 0..e.len {
                scale[e.idx[k]] += c * norm2([e.dx[k], e.dy[k]]).sqrt();
            }
        });
        let boundary = grid.boundary_mask();
        let bad = (0..grid.len()).any(|k| support[k] && !boundary[k] && grad[k] > 1e-8 * scale[k]);
        if bad {
            return Err(invalid("w is not p-subharmonic on the support of the cutoff"));
        }
    }
    let lhs = weighted_gradient_norm(grid, psi.values(), w.values(), p).powf(1.0 / p);
    let rhs = weighted_gradient_norm(grid, w.values(), psi.values(), p).powf(1.0 / p);
    let margin = p * rhs - lhs;
    let report = VerifierReport::new("caccioppoli", vec![(0, lhs - p * rhs)], 0)
        .at_most(tol * p * rhs)
        .with_extra("lhs", lhs)
        .with_extra("rhs", rhs)
        .with_extra("margin", margin);
    Ok(report)
}

/// Constants of the weighted Caccioppoli estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedConstants {
    pub b: f64,
    pub c: f64,
}

/// `B = (1+|p-2|)²/ε₁ + 4(1/ε₂ - 1)(p-1+κ-ε₁)/p²` and
/// `C = 4(1-ε₂)(p-1+κ-ε₁)/p² - τ`; `C ≤ 0` is infeasible.
pub fn weighted_constants(p: f64, kappa: f64, tau: f64, eps1: f64, eps2: f64) -> Result<WeightedConstants> {
    if !(p > 1.0) || !(kappa >= 0.0) || !(tau >= 0.0) || !(eps1 > 0.0) || !(eps2 > 0.0) {
        return Err(invalid("need p > 1, kappa >= 0, tau >= 0 and positive eps1, eps2"));
    }
    let core = p - 1.0 + kappa - eps1;
    let b = (1.0 + (p - 2.0).abs()).powi(2) / eps1 + 4.0 * (1.0 / eps2 - 1.0) * core / (p * p);
    let c = 4.0 * (1.0 - eps2) * core / (p * p) - tau;
    if !(c > 0.0) {
        return Err(Error::ConstantsInfeasible { c });
    }
    Ok(WeightedConstants { b, c })
}

/// `C ∫_{B(R)} ρ|∇u|^p ≤ 100 B/R² ∫_{B(2R)∖B(R)} (|∇u|² + ε)^{p/2}` on a
/// warped product, balls centred at `t = 0`, for a field solved on `B(2R)`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_caccioppoli_check(
    m: &ModelManifold,
    p: f64,
    u: &DiscreteField,
    eps: f64,
    kappa: f64,
    tau: f64,
    eps1: f64,
    eps2: f64,
    r: f64,
) -> Result<VerifierReport> {
    let consts = weighted_constants(p, kappa, tau, eps1, eps2)?;
    if !(r > 0.0) || !(eps >= 0.0) {
        return Err(invalid("need R > 0 and eps >= 0"));
    }
    let grid = u.grid();
    let g1 = grid.as_1d().ok_or_else(|| invalid("the weighted Caccioppoli check runs on 1D grids"))?;
    if grid.manifold() != Some(m) {
        return Err(invalid("the field does not live on the given manifold"));
    }
    let nodes = g1.nodes();
    let h = g1.max_spacing();
    if nodes[0] > -2.0 * r + h || nodes[nodes.len() - 1] < 2.0 * r - h {
        return Err(invalid("the grid must cover B(2R)"));
    }
    for &t in nodes {
        let ric = m.radial_ricci(t);
        let rho = m.weight_rho(t)?;
        if ric < -tau * rho - 1e-12 * (1.0 + ric.abs()) {
            return Err(Error::CurvatureHypothesis(alloc::format!("Ric = {ric} < -tau rho = {} at t = {t}", -tau * rho)));
        }
    }
    let (mut inner, mut shell) = (0.0, 0.0);
    let mut err = None;
    grid.for_each_element(|e| {
        let t = 0.5 * (nodes[e.idx[0]] + nodes[e.idx[1]]);
        let g2 = norm2(e.gradient(u.values()));
        if t.abs() < r {
            match m.weight_rho(t) {
                Ok(rho) => inner += e.mu * rho * g2.powf(0.5 * p),
                Err(x) => err = Some(x),
            }
        } else if t.abs() < 2.0 * r {
            shell += e.mu * (g2 + eps).powf(0.5 * p);
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let lhs = consts.c * inner;
    let rhs = 100.0 * consts.b / (r * r) * shell;
    let report = VerifierReport::new("weighted_caccioppoli", vec![(0, lhs - rhs)], 0)
        .at_most(0.0)
        .with_extra("lhs", lhs)
        .with_extra("rhs", rhs)
        .with_extra("margin", rhs - lhs)
        .with_extra("B", consts.b)
        .with_extra("C", consts.c);
    Ok(report)
}

/// `∫ ρΨ² ≤ ∫ |∇Ψ|²` for each test field, `ρ = (m-2)η''/η`.
pub fn weighted_poincare_check(m: &ModelManifold, family: &[DiscreteField], tol: f64) -> Result<VerifierReport> {
    if family.is_empty() {
        return Err(Error::NoData);
    }
    m.weight_rho(0.0_f64.clamp(m.domain().lo, m.domain().hi))?;
    let mut samples = Vec::with_capacity(family.len());
    let mut scale: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    for (i, psi) in family.iter().enumerate() {
        let grid = psi.grid();
        let g1 = grid.as_1d().ok_or_else(|| invalid("weighted Poincare test fields live on 1D grids"))?;
        if grid.manifold() != Some(m) {
            return Err(invalid("test field does not live on the given manifold"));
        }
        let adm = m.admissibility_check(g1.nodes())?;
        if !adm.ok {
            return Err(Error::CurvatureHypothesis("the warp fails the admissibility check".into()));
        }
        let bd = grid.boundary_mask();
        if psi.values().iter().zip(&bd).any(|(v, b)| *b && *v != 0.0) {
            return Err(invalid("test fields must vanish on the grid boundary"));
        }
        let mut lhs = 0.0;
        for (k, (&t, &v)) in g1.nodes().iter().zip(psi.values()).enumerate() {
            lhs += grid.weights()[k] * m.weight_rho(t)? * v * v;
        }
        let rhs = weighted_gradient_norm(grid, &vec![1.0; grid.len()], psi.values(), 2.0);
        scale = scale.max(lhs.abs().max(rhs));
        worst_margin = worst_margin.min(rhs - lhs);
        samples.push((i, lhs - rhs));
    }
    let mut r = VerifierReport::new("weighted_poincare", samples, 0);
    r.scale = scale;
    Ok(r.at_most(tol * scale).with_extra("min_margin", worst_margin))
}
