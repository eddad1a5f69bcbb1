//! Discretization layer: measure-weighted 1D grids on model manifolds and
//! 2D Cartesian grids, nodal finite differences, quadrature and Sobolev norms.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::field::DiscreteField;
use crate::geometry::ModelManifold;
use crate::quadrature::gauss_legendre5;

/// Smallest admissible node count per axis.
pub const MIN_NODES: usize = 8;
/// Bound on the ratio of neighbouring spacings of a 1D grid.
pub const MAX_SPACING_RATIO: f64 = 4.0;

/// Finite-difference stencil anchored at `start` with up to four weights.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil {
    start: usize,
    len: usize,
    w: [f64; 4],
}

impl Stencil {
    fn new(nodes: &[f64], at: usize, start: usize, len: usize, order: usize) -> Self {
        let ws = crate::fd::weights(nodes[at], &nodes[start..start + len], order);
        let mut w = [0.0; 4];
        w[..len].copy_from_slice(&ws);
        Self { start, len, w }
    }

    #[inline]
    fn apply(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.len {
            s += self.w[k] * f(self.start + k);
        }
        s
    }
}

/// First- and second-derivative stencils along one axis: three-point central
/// in the interior, second-order one-sided at the ends.
fn axis_stencils(nodes: &[f64]) -> (Vec<Stencil>, Vec<Stencil>) {
    let n = nodes.len();
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            d1.push(Stencil::new(nodes, i, 0, 3, 1));
            d2.push(Stencil::new(nodes, i, 0, 4, 2));
        } else if i == n - 1 {
            d1.push(Stencil::new(nodes, i, n - 3, 3, 1));
            d2.push(Stencil::new(nodes, i, n - 4, 4, 2));
        } else {
            d1.push(Stencil::new(nodes, i, i - 1, 3, 1));
            d2.push(Stencil::new(nodes, i, i - 1, 3, 2));
        }
    }
    (d1, d2)
}

/// One element of the energy discretization: a 1D cell or a P1 triangle.
/// The gradient on the element is `Σ_k u[idx_k] (dx_k, dy_k)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Element {
    pub mu: f64,
    pub len: usize,
    pub idx: [usize; 3],
    pub dx: [f64; 3],
    pub dy: [f64; 3],
}

impl Element {
    #[inline]
    pub fn gradient(&self, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..self.len {
            g[0] += self.dx[k] * u[self.idx[k]];
            g[1] += self.dy[k] * u[self.idx[k]];
        }
        g
    }
}

/// Measure-weighted grid on an interval of `t`-values.
#[derive(Clone, Debug)]
pub struct Grid1D {
    nodes: Vec<f64>,
    manifold: Option<ModelManifold>,
    area: Vec<f64>,
    cell_measure: Vec<f64>,
    weights: Vec<f64>,
    lumped: Vec<f64>,
    d1: Vec<Stencil>,
    d2: Vec<Stencil>,
}

impl Grid1D {
    /// Uniform grid with flat measure.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::from_nodes(uniform_nodes(a, b, n)?, None)
    }

    /// Uniform grid carrying the measure `A(t) dt` of `manifold`.
    pub fn on_manifold(manifold: &ModelManifold, a: f64, b: f64, n: usize) -> Result<Self> {
        Self::from_nodes(uniform_nodes(a, b, n)?, Some(manifold.clone()))
    }

    /// Grid `center + L sinh(sξ)/sinh(s)` for uniform `ξ ∈ [-1, 1]`: fine near
    /// the centre, coarse toward `±L`.
    pub fn sinh_graded(manifold: Option<&ModelManifold>, center: f64, half_width: f64, n: usize, stretch: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(stretch > 0.0) {
            return Err(invalid("sinh grading needs positive half width and stretch"));
        }
        let xi = uniform_nodes(-1.0, 1.0, n)?;
        let s = stretch.sinh();
        let nodes = xi.iter().map(|x| center + half_width * (stretch * x).sinh() / s).collect();
        Self::from_nodes(nodes, manifold.cloned())
    }

    /// Grid `a + (b - a)(e^{sξ} - 1)/(e^s - 1)` for uniform `ξ ∈ [0, 1]`: fine near `a`.
    pub fn exp_graded(manifold: Option<&ModelManifold>, a: f64, b: f64, n: usize, stretch: f64) -> Result<Self> {
        if !(stretch > 0.0) {
            return Err(invalid("grading stretch must be positive"));
        }
        let xi = uniform_nodes(0.0, 1.0, n)?;
        let den = stretch.exp_m1();
        let mut nodes: Vec<f64> = xi.iter().map(|x| a + (b - a) * (stretch * x).exp_m1() / den).collect();
        let last = nodes.len() - 1;
        nodes[last] = b;
        Self::from_nodes(nodes, manifold.cloned())
    }

    pub fn from_nodes(nodes: Vec<f64>, manifold: Option<ModelManifold>) -> Result<Self> {
        let n = nodes.len();
        if n < MIN_NODES {
            return Err(invalid("a grid needs at least 8 nodes"));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid nodes must be finite and strictly increasing"));
        }
        let h: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        for w in h.windows(2) {
            let r = w[1] / w[0];
            if !(1.0 / MAX_SPACING_RATIO..=MAX_SPACING_RATIO).contains(&r) {
                return Err(invalid("neighbouring grid spacings differ by more than a factor 4"));
            }
        }
        let (area, cell_measure) = match &manifold {
            None => (vec![1.0; n], h.clone()),
            Some(m) => {
                m.check(nodes[0])?;
                m.check(nodes[n - 1])?;
                let area: Vec<f64> = nodes.iter().map(|&t| m.area_unchecked(t)).collect();
                let cells: Vec<f64> = nodes.windows(2).map(|w| gauss_legendre5(|t| m.area_unchecked(t), w[0], w[1])).collect();
                (area, cells)
            }
        };
        if area.iter().chain(&cell_measure).any(|a| !a.is_finite() || *a < 0.0) {
            return Err(invalid("area function is not finite on the grid"));
        }
        if cell_measure.iter().any(|c| *c <= 0.0) {
            return Err(invalid("every cell needs positive measure"));
        }
        let mut weights = vec![0.0; n];
        let mut lumped = vec![0.0; n];
        for c in 0..n - 1 {
            weights[c] += 0.5 * area[c] * h[c];
            weights[c + 1] += 0.5 * area[c + 1] * h[c];
            lumped[c] += 0.5 * cell_measure[c];
            lumped[c + 1] += 0.5 * cell_measure[c];
        }
        let (d1, d2) = axis_stencils(&nodes);
        Ok(Self { nodes, manifold, area, cell_measure, weights, lumped, d1, d2 })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn manifold(&self) -> Option<&ModelManifold> {
        self.manifold.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `A(t_i)` (1 for flat grids).
    pub fn area(&self) -> &[f64] {
        &self.area
    }

    /// Trapezoid weights `A(t_i)(h_{i-1} + h_i)/2`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{cell} A dt` per cell.
    pub fn cell_measure(&self) -> &[f64] {
        &self.cell_measure
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index of the node closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&t).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.nodes.len() => self.nodes.len() - 1,
            Err(i) => {
                if t - self.nodes[i - 1] <= self.nodes[i] - t { i - 1 } else { i }
            }
        }
    }
}

fn uniform_nodes(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("grid interval needs finite a < b"));
    }
    if n < MIN_NODES {
        return Err(invalid("a grid needs at least 8 nodes"));
    }
    let h = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    v[n - 1] = b;
    Ok(v)
}

/// Measure of a 2D grid.
#[derive(Clone, Debug)]
pub enum Measure2D {
    /// Lebesgue measure `dx dy`.
    Flat,
    /// Product `M × ℝ` of a model manifold (radial coordinate `x`) with a line
    /// (coordinate `y`): measure `A(x) dx dy`, plus the fibre directions of `M`
    /// in Hessians.
    Cylinder(ModelManifold),
}

/// Uniform Cartesian grid on `[x0,x1] × [y0,y1]`; node `(i, j)` has index `j·nx + i`.
#[derive(Clone, Debug)]
pub struct Grid2D {
    x0: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    measure: Measure2D,
    weights: Vec<f64>,
    lumped: Vec<f64>,
    d1x: Vec<Stencil>,
    d2x: Vec<Stencil>,
    d1y: Vec<Stencil>,
    d2y: Vec<Stencil>,
}

impl Grid2D {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        Self::with_measure(x, y, nx, ny, Measure2D::Flat)
    }

    pub fn with_measure(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize, measure: Measure2D) -> Result<Self> {
        let xs = uniform_nodes(x.0, x.1, nx)?;
        let ys = uniform_nodes(y.0, y.1, ny)?;
        let hx = (x.1 - x.0) / (nx - 1) as f64;
        let hy = (y.1 - y.0) / (ny - 1) as f64;
        if let Measure2D::Cylinder(m) = &measure {
            m.check(x.0)?;
            m.check(x.1)?;
        }
        let area_at = |t: f64| match &measure {
            Measure2D::Flat => 1.0,
            Measure2D::Cylinder(m) => m.area_unchecked(t),
        };
        let col_area: Vec<f64> = xs.iter().map(|&t| area_at(t)).collect();
        if col_area.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(invalid("area function is not finite on the grid"));
        }
        let mut weights = vec![0.0; nx * ny];
        for j in 0..ny {
            let cy = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
            for i in 0..nx {
                let cx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                weights[j * nx + i] = col_area[i] * cx * cy * hx * hy;
            }
        }
        let (d1x, d2x) = axis_stencils(&xs);
        let (d1y, d2y) = axis_stencils(&ys);
        let mut g = Self {
            x0: x.0,
            nx,
            ny,
            hx,
            hy,
            xs,
            ys,
            measure,
            weights,
            lumped: Vec::new(),
            d1x,
            d2x,
            d1y,
            d2y,
        };
        let mut lumped = vec![0.0; nx * ny];
        g.for_each_element(|e| {
            for k in 0..e.len {
                lumped[e.idx[k]] += e.mu / e.len as f64;
            }
        });
        if lumped.iter().any(|l| !(*l > 0.0)) {
            return Err(invalid("every node needs positive measure"));
        }
        g.lumped = lumped;
        Ok(g)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.hx, self.hy)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn measure(&self) -> &Measure2D {
        &self.measure
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (self.xs[i], self.ys[j])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn area_at(&self, t: f64) -> f64 {
        match &self.measure {
            Measure2D::Flat => 1.0,
            Measure2D::Cylinder(m) => m.area_unchecked(t),
        }
    }

    fn for_each_element(&self, mut f: impl FnMut(&Element)) {
        let (hx, hy) = (self.hx, self.hy);
        let half = 0.5 * hx * hy;
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let k00 = j * self.nx + i;
                let k10 = k00 + 1;
                let k01 = k00 + self.nx;
                let k11 = k01 + 1;
                let x = self.x0 + hx * i as f64;
                let (a1, a2) = match self.measure {
                    Measure2D::Flat => (1.0, 1.0),
                    _ => (self.area_at(x + hx / 3.0), self.area_at(x + 2.0 * hx / 3.0)),
                };
                f(&Element {
                    mu: half * a1,
                    len: 3,
                    idx: [k00, k10, k01],
                    dx: [-1.0 / hx, 1.0 / hx, 0.0],
                    dy: [-1.0 / hy, 0.0, 1.0 / hy],
                });
                f(&Element {
                    mu: half * a2,
                    len: 3,
                    idx: [k11, k01, k10],
                    dx: [1.0 / hx, -1.0 / hx, 0.0],
                    dy: [1.0 / hy, 0.0, -1.0 / hy],
                });
            }
        }
    }
}

/// A grid of either dimension.
#[derive(Clone, Debug)]
pub enum Grid {
    D1(Grid1D),
    D2(Grid2D),
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::D1(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::D2(g)
    }
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::D1(g) => g.len(),
            Grid::D2(g) => g.nx * g.ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_1d(&self) -> Option<&Grid1D> {
        match self {
            Grid::D1(g) => Some(g),
            Grid::D2(_) => None,
        }
    }

    pub fn as_2d(&self) -> Option<&Grid2D> {
        match self {
            Grid::D2(g) => Some(g),
            Grid::D1(_) => None,
        }
    }

    /// Node coordinates; 1D grids report `(t, 0)`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        match self {
            Grid::D1(g) => (g.nodes[k], 0.0),
            Grid::D2(g) => g.point(k),
        }
    }

    /// Quadrature weights of the trapezoid rule.
    pub fn weights(&self) -> &[f64] {
        match self {
            Grid::D1(g) => &g.weights,
            Grid::D2(g) => &g.weights,
        }
    }

    /// Lumped mass `Σ_{elements ∋ i} μ_e / #nodes(e)`, the dual volume of node `i`.
    pub fn lumped_mass(&self) -> &[f64] {
        match self {
            Grid::D1(g) => &g.lumped,
            Grid::D2(g) => &g.lumped,
        }
    }

    /// The model manifold whose radial coordinate is the first axis, if any.
    pub fn manifold(&self) -> Option<&ModelManifold> {
        match self {
            Grid::D1(g) => g.manifold.as_ref(),
            Grid::D2(g) => match &g.measure {
                Measure2D::Flat => None,
                Measure2D::Cylinder(m) => Some(m),
            },
        }
    }

    /// Dimension of the Riemannian manifold the grid discretizes.
    pub fn intrinsic_dim(&self) -> u32 {
        match self {
            Grid::D1(g) => g.manifold.as_ref().map_or(1, |m| m.m()),
            Grid::D2(g) => match &g.measure {
                Measure2D::Flat => 2,
                Measure2D::Cylinder(m) => m.m() + 1,
            },
        }
    }

    /// Nodes on the boundary of the grid (the two ends, or the rectangle edge).
    pub fn boundary_mask(&self) -> Vec<bool> {
        self.collar_mask(1)
    }

    /// Nodes within `width` nodes of the boundary.
    pub fn collar_mask(&self, width: usize) -> Vec<bool> {
        match self {
            Grid::D1(g) => {
                let n = g.len();
                (0..n).map(|i| i < width || i + width >= n).collect()
            }
            Grid::D2(g) => (0..g.nx * g.ny)
                .map(|k| {
                    let (i, j) = g.ij(k);
                    i < width || j < width || i + width >= g.nx || j + width >= g.ny
                })
                .collect(),
        }
    }

    /// Nodes whose `width`-neighbourhood (Chebyshev distance in index space)
    /// lies inside `mask`.
    pub fn erode(&self, mask: &[bool], width: usize) -> Vec<bool> {
        let w = width as isize;
        match self {
            Grid::D1(g) => {
                let n = g.len() as isize;
                (0..n)
                    .map(|i| (-w..=w).all(|d| {
                        let k = i + d;
                        k >= 0 && k < n && mask[k as usize]
                    }))
                    .collect()
            }
            Grid::D2(g) => {
                let (nx, ny) = (g.nx as isize, g.ny as isize);
                (0..g.nx * g.ny)
                    .map(|k| {
                        let (i, j) = g.ij(k);
                        let (i, j) = (i as isize, j as isize);
                        (-w..=w).all(|dj| {
                            (-w..=w).all(|di| {
                                let (a, b) = (i + di, j + dj);
                                a >= 0 && b >= 0 && a < nx && b < ny && mask[(b * nx + a) as usize]
                            })
                        })
                    })
                    .collect()
            }
        }
    }

    /// Characteristic spacing (largest node gap).
    pub fn spacing(&self) -> f64 {
        match self {
            Grid::D1(g) => g.max_spacing(),
            Grid::D2(g) => g.hx.max(g.hy),
        }
    }

    pub(crate) fn for_each_element(&self, mut f: impl FnMut(&Element)) {
        match self {
            Grid::D1(g) => {
                for c in 0..g.len() - 1 {
                    let h = g.nodes[c + 1] - g.nodes[c];
                    f(&Element {
                        mu: g.cell_measure[c],
                        len: 2,
                        idx: [c, c + 1, 0],
                        dx: [-1.0 / h, 1.0 / h, 0.0],
                        dy: [0.0; 3],
                    });
                }
            }
            Grid::D2(g) => g.for_each_element(f),
        }
    }

    /// Nodal gradient by finite differences.
    pub fn grad(&self, u: &[f64]) -> Vec<[f64; 2]> {
        match self {
            Grid::D1(g) => g.d1.iter().map(|s| [s.apply(|k| u[k]), 0.0]).collect(),
            Grid::D2(g) => (0..g.nx * g.ny)
                .map(|k| {
                    let (i, j) = g.ij(k);
                    [g.d1x[i].apply(|a| u[j * g.nx + a]), g.d1y[j].apply(|b| u[b * g.nx + i])]
                })
                .collect(),
        }
    }

    /// Nodal Hessian `(u_xx, u_xy, u_yy)` in the coordinate frame; mixed
    /// partials by iterated first differences.
    pub fn hess(&self, u: &[f64]) -> Vec<[f64; 3]> {
        match self {
            Grid::D1(g) => g.d2.iter().map(|s| [s.apply(|k| u[k]), 0.0, 0.0]).collect(),
            Grid::D2(g) => {
                let ux: Vec<f64> = (0..g.nx * g.ny)
                    .map(|k| {
                        let (i, j) = g.ij(k);
                        g.d1x[i].apply(|a| u[j * g.nx + a])
                    })
                    .collect();
                (0..g.nx * g.ny)
                    .map(|k| {
                        let (i, j) = g.ij(k);
                        [
                            g.d2x[i].apply(|a| u[j * g.nx + a]),
                            g.d1y[j].apply(|b| ux[b * g.nx + i]),
                            g.d2y[j].apply(|b| u[b * g.nx + i]),
                        ]
                    })
                    .collect()
            }
        }
    }

    /// `(m-1) h(t)²`, the fibre contribution to `|∇du|²` per unit `u_t²`, and
    /// `A'/A` at the radial coordinate of node `k`.
    fn fibre(&self, k: usize) -> (f64, f64, f64) {
        match self.manifold() {
            None => (0.0, 0.0, 0.0),
            Some(m) => {
                let t = self.point(k).0;
                let h = m.level_curvature(t);
                (f64::from(m.m() - 1) * h * h, m.log_area_d1(t), m.radial_ricci(t))
            }
        }
    }

    /// Nodal `|∇du|²` (Frobenius norm of the Riemannian Hessian), including the
    /// fibre directions of a model manifold.
    pub fn hessian_norm_sq_from(&self, grad: &[[f64; 2]], hess: &[[f64; 3]]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let [a, b, c] = hess[k];
                let (fib, _, _) = self.fibre(k);
                a * a + 2.0 * b * b + c * c + fib * grad[k][0] * grad[k][0]
            })
            .collect()
    }

    /// Nodal Laplace–Beltrami operator from gradient and Hessian.
    pub fn laplacian_from(&self, grad: &[[f64; 2]], hess: &[[f64; 3]]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (_, la, _) = self.fibre(k);
                hess[k][0] + hess[k][2] + la * grad[k][0]
            })
            .collect()
    }

    /// Nodal `Ric(∇u, ∇u)` for fields depending on the radial coordinate and the flat line.
    pub fn ricci_from(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (_, _, ric) = self.fibre(k);
                ric * grad[k][0] * grad[k][0]
            })
            .collect()
    }

    /// Weighted trapezoid sum `Σ w_i v_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights().iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `Σ_e μ_e F(∇u|_e)`, the element-wise integral used by the energy.
    pub(crate) fn element_integral(&self, u: &[f64], f: impl Fn([f64; 2]) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each_element(|e| s += e.mu * f(e.gradient(u)));
        s
    }
}

/// Nodal gradient of a field (`[∂_t u, 0]` on 1D grids).
pub fn gradient(field: &DiscreteField) -> Vec<[f64; 2]> {
    field.grid().grad(field.values())
}

/// Nodal Hessian `(u_xx, u_xy, u_yy)` of a field (`[u'', 0, 0]` on 1D grids).
pub fn hessian(field: &DiscreteField) -> Vec<[f64; 3]> {
    field.grid().hess(field.values())
}

/// Trapezoid integral of nodal values against the grid measure.
pub fn integrate(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(invalid("value count does not match the grid"));
    }
    Ok(grid.integrate(values))
}

/// `‖∇u‖_{L^p} = (∫ |∇u|^p dv)^{1/p}`, with gradients on the energy elements.
pub fn wp_seminorm(field: &DiscreteField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p must be at least 1"));
    }
    let s = field.grid().element_integral(field.values(), |g| (g[0] * g[0] + g[1] * g[1]).powf(0.5 * p));
    Ok(s.powf(1.0 / p))
}

/// `‖u‖_{L^p}` by the trapezoid rule.
pub fn lp_norm(field: &DiscreteField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p must be at least 1"));
    }
    let v: Vec<f64> = field.values().iter().map(|x| x.abs().powf(p)).collect();
    Ok(field.grid().integrate(&v).powf(1.0 / p))
}

/// `‖u - v‖_{L^p} + ‖∇(u - v)‖_{L^p}`.
pub fn wp_distance(f1: &DiscreteField, f2: &DiscreteField, p: f64) -> Result<f64> {
    let diff = f1.sub(f2)?;
    Ok(lp_norm(&diff, p)? + wp_seminorm(&diff, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DiscreteField;
    use alloc::sync::Arc;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    #[test]
    fn gradient_examples() {
        let g = Arc::new(Grid::from(Grid1D::uniform(0.0, 1.0, 17).unwrap()));
        let c = DiscreteField::from_fn(&g, |_, _| 3.0).unwrap();
        assert!(gradient(&c).iter().all(|d| d[0] == 0.0));
        let lin = DiscreteField::from_fn(&g, |t, _| t).unwrap();
        for d in gradient(&lin) {
            assert_relative_eq!(d[0], 1.0, epsilon = 1e-12);
        }
        let g2 = Arc::new(Grid::from(Grid2D::new((0.0, 3.0), (0.0, 4.0), 13, 17).unwrap()));
        let q = DiscreteField::from_fn(&g2, |x, y| x * x + y * y).unwrap();
        let g2d = g2.as_2d().unwrap();
        let k = g2d.index(4, 8);
        assert_eq!(g2d.point(k), (1.0, 2.0));
        let d = gradient(&q)[k];
        assert_relative_eq!(d[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(d[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn hessian_examples() {
        let g2 = Arc::new(Grid::from(Grid2D::new((-1.0, 1.0), (-1.0, 1.0), 11, 11).unwrap()));
        let lin = DiscreteField::from_fn(&g2, |x, y| 2.0 * x - y + 1.0).unwrap();
        for h in hessian(&lin) {
            for c in h {
                assert!(c.abs() < 1e-11);
            }
        }
        let q = DiscreteField::from_fn(&g2, |x, y| x * x + y * y).unwrap();
        let xy = DiscreteField::from_fn(&g2, |x, y| x * y).unwrap();
        let hq = hessian(&q);
        let hxy = hessian(&xy);
        for k in 0..g2.len() {
            // One-sided rows are exact on quadratics too.
            assert_relative_eq!(hq[k][0], 2.0, epsilon = 1e-10);
            assert_relative_eq!(hq[k][2], 2.0, epsilon = 1e-10);
            assert!(hq[k][1].abs() < 1e-10);
            assert!(hxy[k][0].abs() < 1e-10);
            assert_relative_eq!(hxy[k][1], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn integrate_examples() {
        let m = ModelManifold::radial_euclidean(3, 0.0, 1.0).unwrap();
        let g = Grid::from(Grid1D::on_manifold(&m, 0.0, 1.0, 401).unwrap());
        let ones = vec![1.0; g.len()];
        assert_relative_eq!(integrate(&ones, &g).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-4);
        assert_eq!(integrate(&vec![0.0; g.len()], &g).unwrap(), 0.0);
        let flat = Grid::from(Grid1D::uniform(-50.0, 50.0, 4001).unwrap());
        let v: Vec<f64> = flat.as_1d().unwrap().nodes().iter().map(|t| 1.0 / (1.0 + t * t)).collect();
        // The truncated integral is 2 arctan 50 = π - 0.04.
        assert_relative_eq!(integrate(&v, &flat).unwrap(), 2.0 * 50f64.atan(), epsilon = 1e-3);
        assert!(integrate(&[1.0], &flat).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let m = ModelManifold::radial_euclidean(3, 1.0, 2.0).unwrap();
        let g = Arc::new(Grid::from(Grid1D::on_manifold(&m, 1.0, 2.0, 801).unwrap()));
        let u = DiscreteField::from_fn(&g, |t, _| 2.0 / t - 1.0).unwrap();
        assert_relative_eq!(wp_seminorm(&u, 2.0).unwrap().powi(2), 8.0 * PI, max_relative = 1e-5);
        let c = DiscreteField::from_fn(&g, |_, _| 5.0).unwrap();
        assert_eq!(wp_seminorm(&c, 3.0).unwrap(), 0.0);
        assert_eq!(wp_distance(&u, &u, 1.7).unwrap(), 0.0);
    }

    #[test]
    fn spacing_ratio_is_enforced() {
        let mut nodes: Vec<f64> = (0..10).map(|i| i as f64).collect();
        nodes[9] = 8.0 + 5.0;
        assert!(Grid1D::from_nodes(nodes, None).is_err());
        assert!(Grid1D::uniform(0.0, 1.0, 7).is_err());
        assert!(Grid2D::new((0.0, 1.0), (0.0, 1.0), 8, 7).is_err());
    }

    #[test]
    fn p2_energy_elements_reproduce_five_point_laplacian() {
        // Σ_e μ_e |∇u|² on the split-square mesh equals the 5-point Dirichlet form.
        let g = Grid::from(Grid2D::new((0.0, 1.0), (0.0, 1.0), 9, 9).unwrap());
        let u: Vec<f64> = (0..g.len()).map(|k| ((k * 37) % 11) as f64).collect();
        let e = g.element_integral(&u, |d| d[0] * d[0] + d[1] * d[1]);
        let g2 = g.as_2d().unwrap();
        let (hx, hy) = g2.spacing();
        let mut five = 0.0;
        for j in 0..9 {
            for i in 0..9 {
                let k = g2.index(i, j);
                if i + 1 < 9 {
                    let cy = if j == 0 || j == 8 { 0.5 } else { 1.0 };
                    five += cy * hx * hy * ((u[k + 1] - u[k]) / hx).powi(2);
                }
                if j + 1 < 9 {
                    let cx = if i == 0 || i == 8 { 0.5 } else { 1.0 };
                    five += cx * hx * hy * ((u[k + 9] - u[k]) / hy).powi(2);
                }
            }
        }
        assert_relative_eq!(e, five, max_relative = 1e-12);
    }
}
