//! Numerical checks of the Kato and Bochner identities, the strong-form
//! equation, Caccioppoli-type estimates and the vector inequalities behind the
//! regularization argument.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Grid;

mod bochner;
mod caccioppoli;
mod gallery;
mod inequalities;
mod kato;

pub use bochner::{bochner_residual, bochner_s_residual, strong_form_residual, ResidualOptions};
pub use caccioppoli::{caccioppoli_check, weighted_caccioppoli_check, weighted_constants, weighted_poincare_check, CutoffShape, WeightedConstants};
pub use gallery::{example_gallery, gallery_item, log_annulus_2d, Expected, GalleryId, GalleryItem};
pub use inequalities::{
    monotonicity_gap, monotonicity_suite, regularization_gap, regularization_suite, MonotonicityGap, MonotonicityRow, RegularizationGap,
    RegularizationRow,
};
pub use kato::{kappa, kato_ratio, KappaVariant, KatoOptions};

/// Outcome of one check: the per-node (or per-sample) quantity over the
/// included set, the threshold it was held against and the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifierReport {
    pub quantity: String,
    /// `(node or sample index, value)` for every included entry.
    pub samples: Vec<(usize, f64)>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub threshold: f64,
    /// Magnitude the threshold is relative to (1 for absolute checks).
    pub scale: f64,
    pub pass: bool,
    /// Nodes dropped as gradient-degenerate or in the boundary collar.
    pub excluded: usize,
    /// Named scalars specific to the check (sides of an inequality, margins, fitted constants).
    pub extra: Vec<(&'static str, f64)>,
}

impl VerifierReport {
    pub(crate) fn new(quantity: &str, samples: Vec<(usize, f64)>, excluded: usize) -> Self {
        let (mut min, mut max, mut sum, mut finite) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for &(_, v) in &samples {
            min = min.min(v);
            max = max.max(v);
            if v.is_finite() {
                sum += v;
                finite += 1;
            }
        }
        let mean = if finite == 0 { f64::NAN } else { sum / finite as f64 };
        Self { quantity: quantity.into(), samples, min, max, mean, threshold: f64::NAN, scale: 1.0, pass: false, excluded, extra: Vec::new() }
    }

    /// Passes when every value is at least `threshold`.
    pub(crate) fn at_least(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = self.min >= threshold;
        self
    }

    /// Passes when every value is at most `threshold`.
    pub(crate) fn at_most(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = self.max <= threshold;
        self
    }

    pub(crate) fn with_extra(mut self, name: &'static str, value: f64) -> Self {
        self.extra.push((name, value));
        self
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

/// Nodes kept by a check: inside `region` (all nodes if absent) and at least
/// `collar` nodes away from its edge and from the grid boundary.
pub(crate) fn interior(grid: &Grid, collar: usize, region: Option<&[bool]>) -> Result<Vec<bool>> {
    match region {
        Some(r) if r.len() != grid.len() => Err(crate::error::invalid("region mask does not match the grid")),
        Some(r) => Ok(grid.erode(r, collar)),
        None => {
            let all = alloc::vec![true; grid.len()];
            Ok(grid.erode(&all, collar))
        }
    }
}

pub(crate) fn norm2(g: [f64; 2]) -> f64 {
    g[0] * g[0] + g[1] * g[1]
}

/// Pairwise observed orders `ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})`.
pub fn observed_orders(h: &[f64], err: &[f64]) -> Result<Vec<f64>> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(crate::error::invalid("need matching spacing and error lists of length >= 2"));
    }
    if h.iter().chain(err).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NoData);
    }
    Ok(h.windows(2).zip(err.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect())
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn fitted_order(h: &[f64], err: &[f64]) -> Result<f64> {
    observed_orders(h, err)?;
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_a_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        for o in observed_orders(&h, &e).unwrap() {
            assert!((o - 2.0).abs() < 1e-12);
        }
        assert!((fitted_order(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert!(observed_orders(&h, &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn report_bounds() {
        let r = VerifierReport::new("x", alloc::vec![(0, 1.0), (3, f64::INFINITY)], 2).at_least(0.5);
        assert!(r.pass && r.min == 1.0 && r.mean == 1.0 && r.excluded == 2);
        let r = VerifierReport::new("x", alloc::vec![(0, 1.0)], 0).at_most(0.5);
        assert!(!r.pass);
    }
}
