//! Finite-difference weights on arbitrary stencils.

use alloc::vec;
use alloc::vec::Vec;

/// Weights `w` with `f^{(order)}(x0) ≈ Σ w_j f(xs_j)` (Fornberg's recursion).
pub(crate) fn weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    debug_assert!(n > order);
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn central_second_derivative() {
        let w = weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], -2.0, epsilon = 1e-14);
        assert_relative_eq!(w[2], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn one_sided_first_derivative_is_exact_on_quadratics() {
        let xs = [0.0, 0.3, 0.7];
        let w = weights(0.0, &xs, 1);
        let d: f64 = xs.iter().zip(&w).map(|(x, w)| w * (1.0 + 2.0 * x + 3.0 * x * x)).sum();
        assert_relative_eq!(d, 2.0, epsilon = 1e-12);
    }
}
