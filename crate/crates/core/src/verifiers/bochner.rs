use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use super::{interior, norm2, VerifierReport};
use crate::energy::{operator_pointwise, EnergySpec};
use crate::error::{invalid, Error, Result};
use crate::field::{Analytic, DiscreteField};

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualOptions {
    pub collar: usize,
    pub region: Option<Vec<bool>>,
    /// Gradient-degeneracy threshold; defaults to `1e-8 · max|∇u|`.
    pub theta: Option<f64>,
    /// Pass when the largest residual is at most `tol · scale`.
    pub tol: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { collar: 2, region: None, theta: None, tol: 1e-6 }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p must be a finite number > 1"));
    }
    Ok(())
}

fn require_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        return Err(invalid("eps must be non-negative"));
    }
    if eps == 0.0 {
        return Err(Error::Singularity("the linearized operator needs eps > 0".into()));
    }
    Ok(())
}

/// Nodal residual of `f²Δu + (p-2)/2 ⟨∇f², ∇u⟩` with `f = |∇u|`, all
/// derivatives by finite differences. `scale` is the largest sum of the term
/// magnitudes over the included nodes.
pub fn strong_form_residual(u: &DiscreteField, p: f64, opts: &ResidualOptions) -> Result<VerifierReport> {
    check_p(p)?;
    let grid = u.grid();
    let keep = interior(grid, opts.collar, opts.region.as_deref())?;
    let grad = grid.grad(u.values());
    let hess = grid.hess(u.values());
    let lap = grid.laplacian_from(&grad, &hess);
    let f2: Vec<f64> = grad.iter().map(|g| norm2(*g)).collect();
    let gf2 = grid.grad(&f2);
    let mut samples = Vec::new();
    let mut scale: f64 = 0.0;
    for k in 0..u.len() {
        if !keep[k] {
            continue;
        }
        let inner = gf2[k][0] * grad[k][0] + gf2[k][1] * grad[k][1];
        let res = f2[k] * lap[k] + 0.5 * (p - 2.0) * inner;
        let lap_mag = hess[k][0].abs() + hess[k][2].abs() + (lap[k] - hess[k][0] - hess[k][2]).abs();
        scale = scale.max(f2[k] * lap_mag + 0.5 * (p - 2.0).abs() * norm2(gf2[k]).sqrt() * f2[k].sqrt());
        samples.push((k, res.abs()));
    }
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    let excluded = u.len() - samples.len();
    let mut r = VerifierReport::new("strong_form_residual", samples, excluded);
    r.scale = scale;
    Ok(r.at_most(opts.tol * scale))
}

/// `½𝓛_ε(f_ε²)` against `(p-2)/4 f_ε^{p-4}|∇f_ε²|² + f_ε^{p-2}(|∇du|² + Ric(∇u, ∇u))`.
///
/// The left side is the discrete divergence of the energy module (weak form
/// over lumped mass) applied to the sampled `f_ε²`; the right side uses
/// nodal finite differences. Gradient-degenerate nodes are excluded.
pub fn bochner_residual(u: &DiscreteField, p: f64, eps: f64, opts: &ResidualOptions) -> Result<VerifierReport> {
    check_p(p)?;
    require_eps(eps)?;
    let grid = u.grid();
    let keep = interior(grid, opts.collar, opts.region.as_deref())?;
    let grad = grid.grad(u.values());
    let hess = grid.hess(u.values());
    let hs = grid.hessian_norm_sq_from(&grad, &hess);
    let ric = grid.ricci_from(&grad);
    let fe2: Vec<f64> = grad.iter().map(|g| norm2(*g) + eps).collect();
    let gfe2 = grid.grad(&fe2);
    let spec = EnergySpec::new(p, eps)?;
    let lhs = operator_pointwise(&spec, p - 2.0, grid, u.values(), &fe2);
    let gmax = keep.iter().zip(&grad).filter(|(k, _)| **k).map(|(_, g)| norm2(*g).sqrt()).fold(0.0, f64::max);
    let theta = opts.theta.unwrap_or(1e-8 * gmax);
    let mut samples = Vec::new();
    let mut scale: f64 = 0.0;
    for k in 0..u.len() {
        if !keep[k] || norm2(grad[k]).sqrt() <= theta {
            continue;
        }
        let fe = fe2[k].sqrt();
        let t1 = 0.25 * (p - 2.0) * fe.powf(p - 4.0) * norm2(gfe2[k]);
        let t2 = fe.powf(p - 2.0) * (hs[k] + ric[k]);
        let l = 0.5 * lhs[k];
        scale = scale.max(l.abs().max(t1.abs() + t2.abs()));
        samples.push((k, (l - t1 - t2).abs()));
    }
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    let excluded = u.len() - samples.len();
    let mut r = VerifierReport::new("bochner_residual", samples, excluded);
    r.scale = scale;
    Ok(r.at_most(opts.tol * scale))
}

/// The five-term identity for `½𝓛_{s,ε}(f_ε²)` on an exact strongly
/// p-harmonic radial field, every derivative in closed form.
///
/// The left side is the divergence of `f_ε^s A_ε ∇f_ε²` expanded along the
/// radial coordinate; the right side is the identity termwise. Values are
/// residuals relative to the local term magnitude.
pub fn bochner_s_residual(u: &DiscreteField, p: f64, s: f64, eps: f64, tol: f64) -> Result<VerifierReport> {
    check_p(p)?;
    require_eps(eps)?;
    let profile = match u.analytic() {
        Some(Analytic::Radial { profile, y_slope }) if *y_slope == 0.0 && u.grid().as_1d().is_some() => profile.clone(),
        Some(_) => return Err(Error::Unsupported("the closed-form Bochner identity is implemented for radial fields on 1D grids".into())),
        None => return Err(invalid("an analytic descriptor is required")),
    };
    let grid = u.grid();
    let man = grid.manifold().cloned();
    let mdim = f64::from(grid.intrinsic_dim());
    let mut samples = Vec::with_capacity(u.len());
    let mut worst_abs: f64 = 0.0;
    for k in 0..u.len() {
        let t = grid.point(k).0;
        let [_, d1, d2, d3] = profile.jet(t);
        let (l1, l2, h, ric) = match &man {
            Some(m) => (m.log_area_d1(t), m.log_area_d2(t), m.level_curvature(t), m.radial_ricci_term(t, d1 * d1)?),
            None => (0.0, 0.0, 0.0, 0.0),
        };
        let psi = d1 * d1 + eps;
        let psi1 = 2.0 * d1 * d2;
        let psi2 = 2.0 * d2 * d2 + 2.0 * d1 * d3;
        let a = 1.0 + (p - 2.0) * d1 * d1 / psi;
        let a1 = 2.0 * (p - 2.0) * eps * d1 * d2 / (psi * psi);
        let w = psi.powf(0.5 * s);
        let g = w * a * psi1;
        let g1 = 0.5 * s * psi.powf(0.5 * s - 1.0) * psi1 * a * psi1 + w * a1 * psi1 + w * a * psi2;
        let lhs = 0.5 * (g1 + l1 * g);

        let lap = d2 + l1 * d1;
        let lap1 = d3 + l2 * d1 + l1 * d2;
        let hess_sq = d2 * d2 + (mdim - 1.0) * h * h * d1 * d1;
        let t1 = 0.25 * s * psi.powf(0.5 * (s - 2.0)) * psi1 * psi1;
        let t2 = w * (hess_sq + ric);
        let t3 = 0.25 * (p - 2.0) * (s - p + 2.0) * psi.powf(0.5 * (s - 4.0)) * (d1 * psi1).powi(2);
        let t4 = eps * (psi.powf(0.5 * (s - 2.0)) * d1 * lap1 + 0.5 * (p - 4.0) * psi.powf(0.5 * (s - 4.0)) * d1 * psi1 * lap);
        let rhs = t1 + t2 + t3 + t4;
        let scale = lhs.abs().max(t1.abs() + t2.abs() + t3.abs() + t4.abs());
        let diff = (lhs - rhs).abs();
        worst_abs = worst_abs.max(diff);
        samples.push((k, if scale > 0.0 { diff / scale } else { diff }));
    }
    Ok(VerifierReport::new("bochner_s_residual", samples, 0).at_most(tol).with_extra("max_abs_residual", worst_abs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PlanarAffine, RadialPower};
    use crate::geometry::{ModelManifold, WarpFunction};
    use crate::grid::{Grid, Grid1D, Grid2D, Measure2D};
    use crate::solver::RadialEpsHarmonic;
    use crate::verifiers::fitted_order;
    use alloc::sync::Arc;
    use alloc::vec;

    fn radial(m: u32, k: f64, n: usize) -> DiscreteField {
        let man = ModelManifold::radial_euclidean(m, 0.0, f64::INFINITY).unwrap();
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, n).unwrap()));
        DiscreteField::from_radial(&grid, Arc::new(RadialPower::new(k))).unwrap()
    }

    #[test]
    fn strong_form_converges_on_power_field() {
        let (p, m) = (3.0, 4);
        let k = (p - f64::from(m)) / (p - 1.0);
        let mut hs = vec![];
        let mut es = vec![];
        for n in [65, 129, 257, 513] {
            let u = radial(m, k, n);
            let r = strong_form_residual(&u, p, &ResidualOptions::default()).unwrap();
            hs.push(u.grid().spacing());
            es.push(r.max);
        }
        assert!(fitted_order(&hs, &es).unwrap() > 1.8, "{es:?}");
    }

    #[test]
    fn constants_and_linears_have_zero_residual() {
        let grid = Arc::new(Grid::from(Grid2D::new((-1.0, 1.0), (-1.0, 1.0), 9, 9).unwrap()));
        let c = DiscreteField::from_fn(&grid, |_, _| 2.0).unwrap();
        assert_eq!(strong_form_residual(&c, 1.5, &ResidualOptions::default()).unwrap().max, 0.0);
        let l = DiscreteField::from_planar(&grid, Arc::new(PlanarAffine { a: 1.0, b: 2.0, c: 0.0 })).unwrap();
        let r = bochner_residual(&l, 3.0, 0.1, &ResidualOptions::default()).unwrap();
        assert!(r.max < 1e-12, "{}", r.max);
        assert!(matches!(bochner_residual(&l, 3.0, 0.0, &ResidualOptions::default()), Err(Error::Singularity(_))));
    }

    #[test]
    fn bochner_s_closed_form() {
        let (p, m) = (3.0, 4);
        let u = radial(m, (p - f64::from(m)) / (p - 1.0), 33);
        for s in [1.0, -0.5, 2.0] {
            let r = bochner_s_residual(&u, p, s, 1e-3, 1e-8).unwrap();
            assert!(r.pass, "s={s}: {}", r.max);
        }
        let h = radial(3, -1.0, 33);
        assert!(bochner_s_residual(&h, 2.0, 0.7, 0.5, 1e-10).unwrap().pass);
        let planar = {
            let grid = Arc::new(Grid::from(Grid2D::new((-1.0, 1.0), (-1.0, 1.0), 9, 9).unwrap()));
            DiscreteField::from_planar(&grid, Arc::new(PlanarAffine { a: 1.0, b: 2.0, c: 0.0 })).unwrap()
        };
        assert!(matches!(bochner_s_residual(&planar, 3.0, 1.0, 0.1, 1e-8), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bochner_s_on_a_warped_product() {
        // u' = A^{-1/2} with A = (1+t²)² is 3-harmonic.
        let man = ModelManifold::warped_product(3, WarpFunction::PolyEven { alpha: 2.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
        let grid = Arc::new(Grid::from(Grid1D::on_manifold(&man, -3.0, 3.0, 40).unwrap()));
        let prof = crate::solver::PHarmonicRadial { manifold: man.clone(), p: 3.0, anchor: f64::NEG_INFINITY, c0: 0.0, c1: 1.0 };
        let u = DiscreteField::from_radial(&grid, Arc::new(prof)).unwrap();
        assert!(bochner_s_residual(&u, 3.0, 1.0, 1e-2, 1e-8).unwrap().pass);
    }

    #[test]
    fn bochner_on_eps_harmonic_profile_converges() {
        let (p, eps) = (3.0, 1e-2);
        let man = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        let mut hs = vec![];
        let mut es = vec![];
        for n in [129, 257, 513] {
            let grid = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, n).unwrap()));
            let prof = RadialEpsHarmonic { manifold: man.clone(), p, eps, flux: -1.0, anchor: 1.0, value_at_anchor: 1.0 };
            let u = DiscreteField::from_radial(&grid, Arc::new(prof)).unwrap();
            let r = bochner_residual(&u, p, eps, &ResidualOptions { collar: 3, ..Default::default() }).unwrap();
            hs.push(grid.spacing());
            es.push(r.max);
        }
        assert!(fitted_order(&hs, &es).unwrap() > 1.5, "{es:?}");
    }

    #[test]
    fn add_one_dimension_field() {
        // v(x, y) = u_ε(x) + √ε y on M × ℝ has |∇v|² = f_ε², so v is 3-harmonic
        // up to the tiny regularization used for the check.
        let (p, eps) = (3.0, 0.05);
        let man = ModelManifold::radial_euclidean(3, 0.0, f64::INFINITY).unwrap();
        let prof = Arc::new(RadialEpsHarmonic { manifold: man.clone(), p, eps, flux: -1.0, anchor: 1.0, value_at_anchor: 1.0 });
        let mut es = vec![];
        let mut hs = vec![];
        for n in [33, 65, 129] {
            let g = Grid2D::with_measure((1.0, 2.0), (0.0, 1.0), n, n, Measure2D::Cylinder(man.clone())).unwrap();
            let grid = Arc::new(Grid::from(g));
            let v = DiscreteField::from_radial_with_slope(&grid, prof.clone(), eps.sqrt()).unwrap();
            let r = bochner_residual(&v, p, 1e-12, &ResidualOptions { collar: 3, ..Default::default() }).unwrap();
            hs.push(grid.spacing());
            es.push(r.max);
        }
        assert!(fitted_order(&hs, &es).unwrap() > 0.8, "{es:?}");
        assert!(es[2] < 1e-2 * 3.0, "{es:?}");
    }
}
