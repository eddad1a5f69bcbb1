use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::field::{DiscreteField, PlanarAffine, PlanarJet, PlanarPower, PlanarProfile, RadialPower};
use crate::geometry::{unit_sphere_area, EndType, ModelManifold, WarpFunction};
use crate::grid::{Grid, Grid1D, Grid2D};
use crate::solver::PHarmonicRadial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalleryId {
    /// `log|x|` on an annulus of `ℝ^m`, m-harmonic.
    LogRadial,
    /// `|x|^{(p-m)/(p-1)}` on an annulus of `ℝ^m`, p-harmonic for `p ≠ m`.
    PowerRadial,
    Constant,
    Linear,
    /// `∫_{-∞}^t A^{-1/2}` with `A = (1+t²)²`, 3-harmonic with finite 3-energy.
    FiniteEnergy,
}

impl GalleryId {
    pub fn label(self) -> &'static str {
        match self {
            GalleryId::LogRadial => "a",
            GalleryId::PowerRadial => "b",
            GalleryId::Constant => "c-constant",
            GalleryId::Linear => "c-linear",
            GalleryId::FiniteEnergy => "d",
        }
    }
}

/// Values a gallery field is known to have.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expected {
    /// Kato ratio at every non-degenerate node; `+∞` when `|∇|du||` vanishes
    /// identically, `None` when every node is gradient-degenerate.
    pub kato_ratio: Option<f64>,
    /// `(q, E_q)` over the sampled domain.
    pub q_energy: Option<(f64, f64)>,
    /// Order at which the strong-form residual of the sampled field vanishes.
    pub strong_residual_order: Option<f64>,
    /// End types at `-∞` and `+∞`.
    pub ends: Option<[EndType; 2]>,
    /// `(sup, inf)` of the two-end barrier.
    pub barrier_range: Option<(f64, f64)>,
    pub barrier_energy: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GalleryItem {
    pub id: GalleryId,
    pub name: String,
    pub p: f64,
    pub m: u32,
    pub field: DiscreteField,
    pub expected: Expected,
}

fn annulus_grid(m: u32, n: usize) -> Result<Arc<Grid>> {
    let man = ModelManifold::radial_euclidean(m, 0.0, f64::INFINITY)?;
    Ok(Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, n)?)))
}

/// One gallery field on a grid of resolution `n` (nodes per axis).
pub fn gallery_item(id: GalleryId, p: f64, m: u32, n: usize) -> Result<GalleryItem> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p must be a finite number > 1"));
    }
    if m < 2 {
        return Err(invalid("gallery fields need m >= 2"));
    }
    let mf = f64::from(m);
    let omega = unit_sphere_area(m);
    let item = match id {
        GalleryId::LogRadial => {
            if p != mf {
                return Err(invalid("log|x| is p-harmonic only for p = m"));
            }
            let field = DiscreteField::from_radial(&annulus_grid(m, n)?, Arc::new(RadialPower::new(0.0)))?;
            let expected = Expected {
                kato_ratio: Some(mf),
                q_energy: Some((p, omega * 2f64.ln())),
                strong_residual_order: Some(2.0),
                ..Default::default()
            };
            GalleryItem { id, name: alloc::format!("log|x| on R^{m}"), p, m, field, expected }
        }
        GalleryId::PowerRadial => {
            if p == mf {
                return Err(invalid("|x|^((p-m)/(p-1)) degenerates for p = m; use the logarithm"));
            }
            let k = (p - mf) / (p - 1.0);
            let field = DiscreteField::from_radial(&annulus_grid(m, n)?, Arc::new(RadialPower::new(k)))?;
            let e = -(mf - 1.0) / (p - 1.0);
            let expected = Expected {
                kato_ratio: Some(1.0 + (p - 1.0).powi(2) / (mf - 1.0)),
                q_energy: Some((p, omega * k.abs().powf(p) * (2f64.powf(e + 1.0) - 1.0) / (e + 1.0))),
                strong_residual_order: Some(2.0),
                ..Default::default()
            };
            GalleryItem { id, name: alloc::format!("|x|^{k} on R^{m}"), p, m, field, expected }
        }
        GalleryId::Constant | GalleryId::Linear => {
            if m != 2 {
                return Err(invalid("constant and linear gallery fields live on the flat plane"));
            }
            let grid = Arc::new(Grid::from(Grid2D::new((-1.0, 1.0), (-1.0, 1.0), n, n)?));
            let (prof, kato, energy) = if id == GalleryId::Constant {
                (PlanarAffine { a: 0.0, b: 0.0, c: 1.0 }, None, 0.0)
            } else {
                (PlanarAffine { a: 1.0, b: 2.0, c: 0.0 }, Some(f64::INFINITY), 4.0 * 5f64.powf(0.5 * p))
            };
            let field = DiscreteField::from_planar(&grid, Arc::new(prof))?;
            let expected = Expected { kato_ratio: kato, q_energy: Some((p, energy)), strong_residual_order: None, ..Default::default() };
            let name = if id == GalleryId::Constant { "constant" } else { "x + 2y" };
            GalleryItem { id, name: name.into(), p, m, field, expected }
        }
        GalleryId::FiniteEnergy => {
            if p != 3.0 || m != 3 {
                return Err(invalid("the finite-energy field is defined for p = m = 3"));
            }
            let man = ModelManifold::warped_product(3, WarpFunction::PolyEven { alpha: 2.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0)?;
            let half = 1e4;
            let grid = Arc::new(Grid::from(Grid1D::sinh_graded(Some(&man), 0.0, half, n, half.asinh())?));
            let prof = PHarmonicRadial { manifold: man, p, anchor: f64::NEG_INFINITY, c0: 0.0, c1: 1.0 };
            let field = DiscreteField::from_radial(&grid, Arc::new(prof))?;
            let expected = Expected {
                kato_ratio: Some(3.0),
                q_energy: Some((3.0, PI)),
                strong_residual_order: None,
                ends: Some([EndType::Hyperbolic, EndType::Hyperbolic]),
                barrier_range: Some((1.0, 0.0)),
                barrier_energy: Some(PI.powi(-2)),
            };
            GalleryItem { id, name: "arctan t + pi/2 on (1+t^2)^2".into(), p, m, field, expected }
        }
    };
    Ok(item)
}

/// The default gallery: (a) with `m = 2`, (b) with `p = 3, m = 4`, the
/// constant and linear fields, and (d).
pub fn example_gallery() -> Result<Vec<GalleryItem>> {
    Ok(alloc::vec![
        gallery_item(GalleryId::LogRadial, 2.0, 2, 257)?,
        gallery_item(GalleryId::PowerRadial, 3.0, 4, 257)?,
        gallery_item(GalleryId::Constant, 2.0, 2, 33)?,
        gallery_item(GalleryId::Linear, 2.0, 2, 33)?,
        gallery_item(GalleryId::FiniteEnergy, 3.0, 3, 4001)?,
    ])
}

/// `log|x|`, frozen at `r_min` inside the hole so every node carries a finite value.
#[derive(Debug)]
struct HoledLog {
    r_min: f64,
}

impl PlanarProfile for HoledLog {
    fn jet(&self, x: f64, y: f64) -> PlanarJet {
        if x.hypot(y) < self.r_min {
            return PlanarJet { value: self.r_min.ln(), grad: [0.0; 2], hess: [0.0; 3] };
        }
        PlanarPower { k: 0.0 }.jet(x, y)
    }
}

/// `log|x|` on the flat square `[-r_out, r_out]²` with `n²` nodes, and the
/// annulus mask `r_in ≤ |x| ≤ r_out`.
pub fn log_annulus_2d(n: usize, r_in: f64, r_out: f64) -> Result<(DiscreteField, Vec<bool>)> {
    if !(0.0 < r_in && r_in < r_out) {
        return Err(invalid("need 0 < r_in < r_out"));
    }
    let grid = Arc::new(Grid::from(Grid2D::new((-r_out, r_out), (-r_out, r_out), n, n)?));
    let field = DiscreteField::from_planar(&grid, Arc::new(HoledLog { r_min: 0.5 * r_in }))?;
    let mask = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.point(k);
            let r = x.hypot(y);
            r >= r_in && r <= r_out
        })
        .collect();
    Ok((field, mask))
}
