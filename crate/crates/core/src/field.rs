//! Scalar fields sampled on a grid, optionally carrying closed-form derivatives.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::grid::Grid;

/// Closed-form radial profile `u(t)`.
pub trait RadialProfile: Send + Sync + Debug {
    /// `[u, u', u'', u''']` at `t`.
    fn jet(&self, t: f64) -> [f64; 4];
}

/// Value, gradient and Hessian `(u_xx, u_xy, u_yy)` of a planar field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

/// Closed-form field on the plane.
pub trait PlanarProfile: Send + Sync + Debug {
    fn jet(&self, x: f64, y: f64) -> PlanarJet;
}

/// Analytic descriptor attached to a sampled field.
#[derive(Clone, Debug)]
pub enum Analytic {
    /// `u(t) + y_slope · y`: a radial profile, extended linearly along the flat
    /// factor of a cylinder grid (`y_slope = 0` on 1D grids).
    Radial { profile: Arc<dyn RadialProfile>, y_slope: f64 },
    Planar(Arc<dyn PlanarProfile>),
}

#[derive(Clone, Debug)]
pub struct DiscreteField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    analytic: Option<Analytic>,
}

impl DiscreteField {
    pub fn new(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("value count does not match the grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { grid: grid.clone(), values, analytic: None })
    }

    /// Samples `f(x, y)` at every node (`y = 0` on 1D grids).
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        Self::new(grid, values.collect())
    }

    pub fn from_radial(grid: &Arc<Grid>, profile: Arc<dyn RadialProfile>) -> Result<Self> {
        Self::from_radial_with_slope(grid, profile, 0.0)
    }

    /// `u(x) + y_slope · y` on a 2D grid, or `u(t)` on a 1D grid.
    pub fn from_radial_with_slope(grid: &Arc<Grid>, profile: Arc<dyn RadialProfile>, y_slope: f64) -> Result<Self> {
        if y_slope != 0.0 && grid.as_2d().is_none() {
            return Err(invalid("a y-slope needs a 2D grid"));
        }
        let mut f = Self::from_fn(grid, |x, y| profile.jet(x)[0] + y_slope * y)?;
        f.analytic = Some(Analytic::Radial { profile, y_slope });
        Ok(f)
    }

    pub fn from_planar(grid: &Arc<Grid>, profile: Arc<dyn PlanarProfile>) -> Result<Self> {
        if grid.as_2d().is_none() {
            return Err(invalid("planar profiles need a 2D grid"));
        }
        let mut f = Self::from_fn(grid, |x, y| profile.jet(x, y).value)?;
        f.analytic = Some(Analytic::Planar(profile));
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn analytic(&self) -> Option<&Analytic> {
        self.analytic.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// New field on the same grid without an analytic descriptor.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(&self.grid, values)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.len() == other.grid.len()
                && (0..self.grid.len()).all(|k| self.grid.point(k) == other.grid.point(k))
                && self.grid.weights() == other.grid.weights())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(invalid("fields live on different grids"));
        }
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(v)
    }

    /// Closed-form `(∇u, Hessian)` in the coordinate frame at node `k`, if a
    /// descriptor is attached.
    pub fn analytic_derivatives(&self, k: usize) -> Option<([f64; 2], [f64; 3])> {
        let (x, y) = self.grid.point(k);
        match self.analytic.as_ref()? {
            Analytic::Radial { profile, y_slope } => {
                let j = profile.jet(x);
                Some(([j[1], *y_slope], [j[2], 0.0, 0.0]))
            }
            Analytic::Planar(p) => {
                let j = p.jet(x, y);
                Some((j.grad, j.hess))
            }
        }
    }
}

/// `offset + scale · t^k` (`k ≠ 0`) or `offset + scale · ln t` (`k = 0`), for `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialPower {
    pub k: f64,
    pub scale: f64,
    pub offset: f64,
}

impl RadialPower {
    pub fn new(k: f64) -> Self {
        Self { k, scale: 1.0, offset: 0.0 }
    }
}

impl RadialProfile for RadialPower {
    fn jet(&self, t: f64) -> [f64; 4] {
        let (k, s) = (self.k, self.scale);
        if k == 0.0 {
            [self.offset + s * t.ln(), s / t, -s / (t * t), 2.0 * s / (t * t * t)]
        } else {
            let v = t.powf(k);
            [
                self.offset + s * v,
                s * k * v / t,
                s * k * (k - 1.0) * v / (t * t),
                s * k * (k - 1.0) * (k - 2.0) * v / (t * t * t),
            ]
        }
    }
}

/// Affine radial profile `a + b t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialAffine {
    pub a: f64,
    pub b: f64,
}

impl RadialProfile for RadialAffine {
    fn jet(&self, t: f64) -> [f64; 4] {
        [self.a + self.b * t, self.b, 0.0, 0.0]
    }
}

/// `|x|^k` (`k ≠ 0`) or `ln |x|` (`k = 0`) on the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarPower {
    pub k: f64,
}

impl PlanarProfile for PlanarPower {
    fn jet(&self, x: f64, y: f64) -> PlanarJet {
        let r = x.hypot(y);
        let [v, d1, d2, _] = RadialPower::new(self.k).jet(r);
        let (ex, ey) = (x / r, y / r);
        let tang = d1 / r;
        PlanarJet {
            value: v,
            grad: [d1 * ex, d1 * ey],
            hess: [d2 * ex * ex + tang * (1.0 - ex * ex), (d2 - tang) * ex * ey, d2 * ey * ey + tang * (1.0 - ey * ey)],
        }
    }
}

/// Affine planar field `c + a x + b y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarAffine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PlanarProfile for PlanarAffine {
    fn jet(&self, x: f64, y: f64) -> PlanarJet {
        PlanarJet { value: self.c + self.a * x + self.b * y, grad: [self.a, self.b], hess: [0.0; 3] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Grid2D};
    use approx::assert_relative_eq;

    #[test]
    fn descriptor_values_are_sampled_exactly() {
        let g = Arc::new(Grid::from(Grid1D::uniform(1.0, 2.0, 9).unwrap()));
        let prof = RadialPower::new(-0.5);
        let f = DiscreteField::from_radial(&g, Arc::new(prof)).unwrap();
        for (k, v) in f.values().iter().enumerate() {
            assert_eq!(*v, prof.jet(g.point(k).0)[0]);
        }
    }

    #[test]
    fn planar_power_matches_finite_differences() {
        let p = PlanarPower { k: 0.0 };
        let (x, y, h) = (1.2, -0.7, 1e-5);
        let j = p.jet(x, y);
        let fx = |x: f64, y: f64| p.jet(x, y).grad;
        assert_relative_eq!(j.hess[0], (fx(x + h, y)[0] - fx(x - h, y)[0]) / (2.0 * h), epsilon = 1e-8);
        assert_relative_eq!(j.hess[1], (fx(x, y + h)[0] - fx(x, y - h)[0]) / (2.0 * h), epsilon = 1e-8);
        assert_relative_eq!(j.hess[2], (fx(x, y + h)[1] - fx(x, y - h)[1]) / (2.0 * h), epsilon = 1e-8);
    }

    #[test]
    fn rejects_non_finite_and_mismatched() {
        let g = Arc::new(Grid::from(Grid2D::new((0.0, 1.0), (0.0, 1.0), 8, 8).unwrap()));
        assert!(DiscreteField::new(&g, alloc::vec![0.0; 3]).is_err());
        assert!(DiscreteField::from_fn(&g, |x, _| 1.0 / x).is_err());
    }
}
