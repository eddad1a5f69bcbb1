#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

//! Numerical core for the regularized p-Laplacian on model manifolds.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`geometry`]: radial Euclidean domains and warped products `ℝ × N`,
//!   their area function `A(t)`, Poincaré weight, radial Ricci term and the
//!   integral test that classifies ends as p-parabolic or p-hyperbolic.
//! - [`grid`] and [`field`]: measure-weighted 1D grids, 2D Cartesian grids,
//!   finite-difference derivatives and quadrature.
//! - [`energy`]: the `(p, ε)`-energy, its weak residual and its linearization.
//! - [`solver`]: damped Newton on the discrete energy, ε-continuation and the
//!   closed-form radial p-harmonic functions.
//! - [`capacity`]: analytic and numeric condenser capacities, barrier sweeps,
//!   tail-energy decay and volume growth checks.
//! - [`verifiers`]: Kato ratios, Bochner residuals and the vector and
//!   integral inequalities used by the regularization argument.
//!
//! IO, configuration files and report formats live in the `plap` CLI crate.

extern crate alloc;

pub mod capacity;
pub mod energy;
pub mod error;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod quadrature;
pub mod solver;
pub mod verifiers;

mod fd;

pub use crate::energy::EnergySpec;
pub use crate::error::{Error, Result};
pub use crate::field::DiscreteField;
pub use crate::geometry::{Direction, EndType, ModelManifold, WarpFunction};
pub use crate::grid::{Grid, Grid1D, Grid2D};
