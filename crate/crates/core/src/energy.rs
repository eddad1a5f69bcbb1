//! The `(p, ε)`-energy `∫ (|∇u|² + ε)^{p/2} dv`, its gradient (the weak
//! residual of the perturbed p-Laplacian) and its Hessian (the linearized operator).
//!
//! The discrete energy is a sum over elements (1D cells, P1 triangles) of
//! `μ_e F(∇u|_e)` with `F(g) = (|g|² + ε)^{p/2}`, so it is exactly convex.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::field::DiscreteField;
use crate::grid::{Element, Grid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySpec {
    pub p: f64,
    pub eps: f64,
}

impl EnergySpec {
    pub fn new(p: f64, eps: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid("p must be a finite number above 1"));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid("epsilon must be finite and non-negative"));
        }
        Ok(Self { p, eps })
    }

    /// The raw p-energy (`ε = 0`).
    pub fn raw(p: f64) -> Result<Self> {
        Self::new(p, 0.0)
    }

    #[inline]
    pub(crate) fn density(&self, g: [f64; 2]) -> f64 {
        (g[0] * g[0] + g[1] * g[1] + self.eps).powf(0.5 * self.p)
    }

    /// `f^{p-2}` where `f² = |g|² + ε`, or a singularity error.
    #[inline]
    fn flux_coefficient(&self, g: [f64; 2]) -> Result<f64> {
        let f2 = g[0] * g[0] + g[1] * g[1] + self.eps;
        if f2 == 0.0 {
            if self.p < 2.0 {
                return Err(Error::Singularity("p < 2 with zero gradient and epsilon = 0".into()));
            }
            return Ok(if self.p == 2.0 { 1.0 } else { 0.0 });
        }
        Ok(f2.powf(0.5 * self.p - 1.0))
    }
}

/// `E_{p,ε}(u)`.
pub fn energy(spec: &EnergySpec, u: &DiscreteField) -> f64 {
    energy_of(spec, u.grid(), u.values())
}

pub(crate) fn energy_of(spec: &EnergySpec, grid: &Grid, u: &[f64]) -> f64 {
    grid.element_integral(u, |g| spec.density(g))
}

/// `∫ |∇u|^q dv`.
pub fn q_energy(u: &DiscreteField, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(invalid("q must be positive"));
    }
    Ok(u.grid().element_integral(u.values(), |g| (g[0] * g[0] + g[1] * g[1]).powf(0.5 * q)))
}

/// Growth of a quantity over an increasing family of domains.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
    /// `true` when the increments shrink by at least a factor `0.75` over the last step.
    pub converging: bool,
}

/// q-energies of the same field on growing domains; flags whether they settle.
pub fn q_energy_growth(fields: &[DiscreteField], q: f64) -> Result<GrowthReport> {
    if fields.len() < 3 {
        return Err(invalid("growth study needs at least three domains"));
    }
    let values = fields.iter().map(|f| q_energy(f, q)).collect::<Result<Vec<_>>>()?;
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let n = increments.len();
    let (a, b) = (increments[n - 2], increments[n - 1]);
    let converging = b.abs() <= 0.75 * a.abs() || b.abs() <= 1e-12 * values[n].abs();
    Ok(GrowthReport { values, increments, converging })
}

/// Full gradient `∂E/∂u_i` at every node.
pub fn energy_gradient(spec: &EnergySpec, grid: &Grid, u: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.len()];
    let mut err = None;
    grid.for_each_element(|e| {
        if err.is_some() {
            return;
        }
        let g = e.gradient(u);
        match spec.flux_coefficient(g) {
            Ok(c) => {
                let s = e.mu * spec.p * c;
                for k in 0..e.len {
                    out[e.idx[k]] += s * (g[0] * e.dx[k] + g[1] * e.dy[k]);
                }
            }
            Err(x) => err = Some(x),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Gradient of the discrete energy with respect to interior node values;
/// entries at grid-boundary nodes are zero.
pub fn weak_residual(spec: &EnergySpec, u: &DiscreteField) -> Result<Vec<f64>> {
    let mut r = energy_gradient(spec, u.grid(), u.values())?;
    for (ri, b) in r.iter_mut().zip(u.grid().boundary_mask()) {
        if b {
            *ri = 0.0;
        }
    }
    Ok(r)
}

/// Element matrix `p f^{p-2} (I + (p-2) g gᵀ / f²)` as `(a11, a12, a22)`.
#[inline]
fn second_variation(spec: &EnergySpec, g: [f64; 2]) -> [f64; 3] {
    let f2 = g[0] * g[0] + g[1] * g[1] + spec.eps;
    let c = spec.p * f2.powf(0.5 * spec.p - 1.0);
    let k = if spec.p == 2.0 { 0.0 } else { (spec.p - 2.0) / f2 };
    [c * (1.0 + k * g[0] * g[0]), c * k * g[0] * g[1], c * (1.0 + k * g[1] * g[1])]
}

fn require_positive_eps(spec: &EnergySpec) -> Result<()> {
    if spec.eps > 0.0 {
        Ok(())
    } else {
        Err(Error::Singularity("the linearized operator needs epsilon > 0".into()))
    }
}

#[inline]
fn element_apply(e: &Element, a: [f64; 3], v: &[f64], out: &mut [f64]) {
    let d = e.gradient(v);
    let q = [a[0] * d[0] + a[1] * d[1], a[1] * d[0] + a[2] * d[1]];
    for k in 0..e.len {
        out[e.idx[k]] += e.mu * (q[0] * e.dx[k] + q[1] * e.dy[k]);
    }
}

/// `out = H(u) v`, the Hessian of the discrete energy applied to `v`.
pub(crate) fn hessian_apply(spec: &EnergySpec, grid: &Grid, u: &[f64], v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    grid.for_each_element(|e| element_apply(e, second_variation(spec, e.gradient(u)), v, out));
}

/// Diagonal of the energy Hessian.
pub(crate) fn hessian_diagonal(spec: &EnergySpec, grid: &Grid, u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    grid.for_each_element(|e| {
        let a = second_variation(spec, e.gradient(u));
        for k in 0..e.len {
            let (x, y) = (e.dx[k], e.dy[k]);
            out[e.idx[k]] += e.mu * (a[0] * x * x + 2.0 * a[1] * x * y + a[2] * y * y);
        }
    });
    out
}

/// Tridiagonal energy Hessian of a 1D grid as `(sub, diag, sup)`.
pub(crate) fn hessian_tridiagonal(spec: &EnergySpec, grid: &Grid, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    grid.for_each_element(|e| {
        let a = second_variation(spec, e.gradient(u))[0];
        let (i, j) = (e.idx[0], e.idx[1]);
        let c = e.mu * a * e.dx[1] * e.dx[1];
        diag[i] += c;
        diag[j] += c;
        sup[i] -= c;
        sub[j] -= c;
    });
    (sub, diag, sup)
}

/// Weak form of `𝓛_ε ψ = div(f_ε^{p-2} A_ε ∇ψ)` tested against the nodal hat
/// functions: `-(1/p) H(u) ψ`. Symmetric and negative semidefinite.
pub fn linearized_action(spec: &EnergySpec, u: &DiscreteField, psi: &DiscreteField) -> Result<Vec<f64>> {
    require_positive_eps(spec)?;
    if !u.same_grid(psi) {
        return Err(invalid("fields live on different grids"));
    }
    let mut out = vec![0.0; u.len()];
    hessian_apply(spec, u.grid(), u.values(), psi.values(), &mut out);
    let s = -1.0 / spec.p;
    out.iter_mut().for_each(|o| *o *= s);
    Ok(out)
}

/// Pointwise `𝓛_{s,ε} ψ` at every node: the weak form divided by the dual
/// volume, with flux coefficient `f_ε^s A_ε` instead of `f_ε^{p-2} A_ε`.
pub(crate) fn operator_pointwise(spec: &EnergySpec, s: f64, grid: &Grid, u: &[f64], psi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    grid.for_each_element(|e| {
        let g = e.gradient(u);
        let f2 = g[0] * g[0] + g[1] * g[1] + spec.eps;
        let c = f2.powf(0.5 * s);
        let k = if spec.p == 2.0 { 0.0 } else { (spec.p - 2.0) / f2 };
        let a = [c * (1.0 + k * g[0] * g[0]), c * k * g[0] * g[1], c * (1.0 + k * g[1] * g[1])];
        element_apply(e, a, psi, &mut out);
    });
    for (o, m) in out.iter_mut().zip(grid.lumped_mass()) {
        *o = -*o / m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ModelManifold;
    use crate::grid::{Grid1D, Grid2D};
    use alloc::sync::Arc;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn euclid_grid(a: f64, b: f64, n: usize) -> Arc<Grid> {
        let m = ModelManifold::radial_euclidean(3, 0.0, 10.0).unwrap();
        Arc::new(Grid::from(Grid1D::on_manifold(&m, a, b, n).unwrap()))
    }

    #[test]
    fn energy_examples() {
        let g = euclid_grid(0.0, 1.0, 101);
        let c = DiscreteField::from_fn(&g, |_, _| 2.0).unwrap();
        assert_eq!(energy(&EnergySpec::raw(2.0).unwrap(), &c), 0.0);
        let e = energy(&EnergySpec::new(2.0, 0.25).unwrap(), &c);
        assert_relative_eq!(e, 0.25 * 4.0 * PI / 3.0, max_relative = 1e-12);
        let g = euclid_grid(1.0, 2.0, 801);
        let u = DiscreteField::from_fn(&g, |t, _| 2.0 / t - 1.0).unwrap();
        assert_relative_eq!(energy(&EnergySpec::raw(2.0).unwrap(), &u), 8.0 * PI, max_relative = 1e-5);
    }

    #[test]
    fn residual_matches_energy_differences() {
        let g = euclid_grid(1.0, 2.0, 21);
        let spec = EnergySpec::new(3.0, 0.1).unwrap();
        let u = DiscreteField::from_fn(&g, |t, _| (3.0 * t).sin()).unwrap();
        let r = weak_residual(&spec, &u).unwrap();
        for i in 1..20 {
            let h = 1e-6;
            let mut a = u.values().to_vec();
            let mut b = a.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (energy_of(&spec, &g, &a) - energy_of(&spec, &g, &b)) / (2.0 * h);
            assert_relative_eq!(r[i], fd, max_relative = 1e-6);
        }
        assert_eq!(r[0], 0.0);
        assert_eq!(r[20], 0.0);
    }

    #[test]
    fn linear_field_has_zero_interior_residual_in_2d() {
        let g = Arc::new(Grid::from(Grid2D::new((0.0, 1.0), (0.0, 2.0), 9, 12).unwrap()));
        let u = DiscreteField::from_fn(&g, |x, y| 0.3 * x - 2.0 * y).unwrap();
        for eps in [0.0, 0.5] {
            let r = weak_residual(&EnergySpec::new(1.5, eps).unwrap(), &u).unwrap();
            assert!(r.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn p2_action_is_five_point_laplacian() {
        let g = Arc::new(Grid::from(Grid2D::new((0.0, 1.0), (0.0, 1.0), 10, 10).unwrap()));
        let u = DiscreteField::from_fn(&g, |x, y| (x * y).sin()).unwrap();
        let psi = DiscreteField::from_fn(&g, |x, y| x * x * y + y.cos()).unwrap();
        let act = linearized_action(&EnergySpec::new(2.0, 0.3).unwrap(), &u, &psi).unwrap();
        let g2 = g.as_2d().unwrap();
        let (hx, hy) = g2.spacing();
        let v = psi.values();
        for j in 1..9 {
            for i in 1..9 {
                let k = g2.index(i, j);
                let lap = (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (hx * hx) + (v[k + 10] - 2.0 * v[k] + v[k - 10]) / (hy * hy);
                assert_relative_eq!(act[k], lap * hx * hy, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn action_matches_directional_derivative_of_residual() {
        let g = euclid_grid(1.0, 2.0, 31);
        let spec = EnergySpec::new(4.0, 0.05).unwrap();
        let u = DiscreteField::from_fn(&g, |t, _| 1.0 / t).unwrap();
        let psi = DiscreteField::from_fn(&g, |t, _| (5.0 * t).cos()).unwrap();
        let act = linearized_action(&spec, &u, &psi).unwrap();
        let h = 1e-6;
        let up: Vec<f64> = u.values().iter().zip(psi.values()).map(|(a, b)| a + h * b).collect();
        let um: Vec<f64> = u.values().iter().zip(psi.values()).map(|(a, b)| a - h * b).collect();
        let rp = energy_gradient(&spec, &g, &up).unwrap();
        let rm = energy_gradient(&spec, &g, &um).unwrap();
        for i in 0..31 {
            let fd = -(rp[i] - rm[i]) / (2.0 * h) / spec.p;
            assert_relative_eq!(act[i], fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_direction_is_annihilated() {
        let g = euclid_grid(1.0, 2.0, 31);
        let spec = EnergySpec::new(1.5, 0.01).unwrap();
        let u = DiscreteField::from_fn(&g, |t, _| t * t).unwrap();
        let c = DiscreteField::from_fn(&g, |_, _| 1.0).unwrap();
        assert!(linearized_action(&spec, &u, &c).unwrap().iter().all(|x| x.abs() < 1e-12));
        assert!(matches!(linearized_action(&EnergySpec::raw(3.0).unwrap(), &u, &c), Err(Error::Singularity(_))));
    }

    #[test]
    fn singular_gradient_is_refused() {
        let g = euclid_grid(1.0, 2.0, 11);
        let c = DiscreteField::from_fn(&g, |_, _| 1.0).unwrap();
        assert!(matches!(weak_residual(&EnergySpec::raw(1.5).unwrap(), &c), Err(Error::Singularity(_))));
        assert!(weak_residual(&EnergySpec::raw(3.0).unwrap(), &c).is_ok());
    }
}
