use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use super::{interior, norm2, VerifierReport};
use crate::error::{invalid, Error, Result};
use crate::field::DiscreteField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaVariant {
    /// `(p-1)²/(m-1)` for `p ≤ 2`, else `max(1/(m-1), min((p-1)²/m, 1))`.
    Standard,
    /// `min((p-1)²/(m-1), 1)`.
    Refined,
    /// `(p-1)²/(m-1)` for `p < 2`, else `1/(m-1)`.
    Weak,
}

/// Refined Kato constant `κ(p, m)`.
pub fn kappa(p: f64, m: u32, variant: KappaVariant) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("kappa needs p > 1"));
    }
    if m < 2 {
        return Err(invalid("kappa needs m >= 2"));
    }
    let (mf, q) = (f64::from(m), (p - 1.0) * (p - 1.0));
    Ok(match variant {
        KappaVariant::Standard if p <= 2.0 => q / (mf - 1.0),
        KappaVariant::Standard => (1.0 / (mf - 1.0)).max((q / mf).min(1.0)),
        KappaVariant::Refined => (q / (mf - 1.0)).min(1.0),
        KappaVariant::Weak if p >= 2.0 => 1.0 / (mf - 1.0),
        KappaVariant::Weak => q / (mf - 1.0),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KatoOptions {
    /// Gradient-degeneracy threshold; defaults to `1e-8 · max|∇u|`.
    pub theta: Option<f64>,
    pub collar: usize,
    pub region: Option<Vec<bool>>,
    /// Use the closed-form derivatives of the analytic descriptor instead of differencing.
    pub analytic: bool,
    pub tol: f64,
}

impl Default for KatoOptions {
    fn default() -> Self {
        Self { theta: None, collar: 2, region: None, analytic: false, tol: 1e-3 }
    }
}

/// Nodal Kato ratio `|∇du|² / |∇|du||²` against `1 + κ(p, m)` in its refined form.
///
/// In the default mode `|∇u|` is sampled first and then differenced. Nodes
/// with `|∇u| ≤ θ` are excluded; nodes where `|∇|du||` vanishes to rounding
/// report `+∞`.
pub fn kato_ratio(u: &DiscreteField, p: f64, opts: &KatoOptions) -> Result<VerifierReport> {
    let grid = u.grid();
    let m = grid.intrinsic_dim();
    let kap = kappa(p, m, KappaVariant::Refined)?;
    let keep = interior(grid, opts.collar, opts.region.as_deref())?;
    let (grad, hess_sq, grad_f_sq) = if opts.analytic {
        if u.analytic().is_none() {
            return Err(invalid("analytic Kato ratios need an analytic descriptor"));
        }
        let mut grad = Vec::with_capacity(u.len());
        let mut hess = Vec::with_capacity(u.len());
        for k in 0..u.len() {
            let (g, h) = u.analytic_derivatives(k).ok_or_else(|| invalid("missing analytic derivatives"))?;
            grad.push(g);
            hess.push(h);
        }
        let hs = grid.hessian_norm_sq_from(&grad, &hess);
        let gf: Vec<f64> = grad
            .iter()
            .zip(&hess)
            .map(|(g, h)| {
                let f = norm2(*g).sqrt();
                if f == 0.0 {
                    return 0.0;
                }
                norm2([(h[0] * g[0] + h[1] * g[1]) / f, (h[1] * g[0] + h[2] * g[1]) / f])
            })
            .collect();
        (grad, hs, gf)
    } else {
        let grad = grid.grad(u.values());
        let hess = grid.hess(u.values());
        let hs = grid.hessian_norm_sq_from(&grad, &hess);
        let f: Vec<f64> = grad.iter().map(|g| norm2(*g).sqrt()).collect();
        let gf = grid.grad(&f).into_iter().map(norm2).collect();
        (grad, hs, gf)
    };
    let gmax = keep.iter().zip(&grad).filter(|(k, _)| **k).map(|(_, g)| norm2(*g).sqrt()).fold(0.0, f64::max);
    let theta = opts.theta.unwrap_or(1e-8 * gmax);
    if !(theta >= 0.0) {
        return Err(invalid("theta must be non-negative"));
    }
    let extent = {
        let (x0, y0) = grid.point(0);
        let (x1, y1) = grid.point(grid.len() - 1);
        ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
    };
    let flat = 1e-9 * gmax / extent;
    let mut samples = Vec::new();
    let mut excluded = 0;
    for k in 0..u.len() {
        if !keep[k] || norm2(grad[k]).sqrt() <= theta || gmax == 0.0 {
            excluded += 1;
            continue;
        }
        let den = grad_f_sq[k];
        let ratio = if den.sqrt() <= flat { f64::INFINITY } else { hess_sq[k] / den };
        samples.push((k, ratio));
    }
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    Ok(VerifierReport::new("kato_ratio", samples, excluded).at_least(1.0 + kap - opts.tol).with_extra("kappa", kap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PlanarAffine, RadialPower};
    use crate::geometry::ModelManifold;
    use crate::grid::{Grid, Grid1D, Grid2D};
    use alloc::sync::Arc;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_examples() {
        assert_relative_eq!(kappa(2.0, 3, KappaVariant::Standard).unwrap(), 0.5);
        assert_relative_eq!(kappa(3.0, 3, KappaVariant::Standard).unwrap(), 1.0);
        assert_relative_eq!(kappa(3.0, 5, KappaVariant::Refined).unwrap(), 1.0);
        assert_relative_eq!(kappa(3.0, 4, KappaVariant::Weak).unwrap(), 1.0 / 3.0);
        assert_relative_eq!(kappa(1.5, 4, KappaVariant::Weak).unwrap(), 0.25 / 3.0);
        assert!(kappa(1.0, 3, KappaVariant::Standard).is_err());
        assert!(kappa(2.0, 1, KappaVariant::Standard).is_err());
    }

    #[test]
    fn radial_power_ratio() {
        let (p, m) = (3.0, 4u32);
        let man = ModelManifold::radial_euclidean(m, 0.0, f64::INFINITY).unwrap();
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, 801).unwrap()));
        let k = (p - f64::from(m)) / (p - 1.0);
        let u = DiscreteField::from_radial(&grid, Arc::new(RadialPower::new(k))).unwrap();
        let fd = kato_ratio(&u, p, &KatoOptions::default()).unwrap();
        assert_relative_eq!(fd.min, 7.0 / 3.0, max_relative = 1e-4);
        assert_relative_eq!(fd.max, 7.0 / 3.0, max_relative = 1e-4);
        let an = kato_ratio(&u, p, &KatoOptions { analytic: true, ..Default::default() }).unwrap();
        assert_relative_eq!(an.min, 7.0 / 3.0, max_relative = 1e-12);
        assert!(an.pass);
    }

    #[test]
    fn linear_field_is_vacuous() {
        let grid = Arc::new(Grid::from(Grid2D::new((-1.0, 1.0), (-1.0, 1.0), 17, 17).unwrap()));
        let u = DiscreteField::from_planar(&grid, Arc::new(PlanarAffine { a: 0.3, b: -2.0, c: 1.0 })).unwrap();
        let r = kato_ratio(&u, 2.0, &KatoOptions::default()).unwrap();
        assert!(r.pass && r.min.is_infinite());
        let c = DiscreteField::from_fn(&grid, |_, _| 4.0).unwrap();
        assert!(matches!(kato_ratio(&c, 2.0, &KatoOptions::default()), Err(Error::NoData)));
    }
}
