use std::f64::consts::PI;
use std::sync::Arc;

use plap_core::capacity::{capacity_analytic, capacity_numeric, Condenser};
use plap_core::energy::{energy, q_energy};
use plap_core::geometry::{TabulatedWarp, TailLaw};
use plap_core::solver::{radial_p_harmonic_on, sandwich_check, solve_dirichlet, two_end_barrier, Dirichlet, SolveConfig};
use plap_core::{Direction, DiscreteField, EndType, EnergySpec, Error, Grid, Grid1D, Grid2D, ModelManifold, WarpFunction};

fn euclid(m: u32) -> ModelManifold {
    ModelManifold::radial_euclidean(m, 0.0, f64::INFINITY).unwrap()
}

fn fixed_eps(eps: f64) -> SolveConfig {
    SolveConfig { eps_schedule: vec![eps], ..Default::default() }
}

#[test]
fn solver_converges_to_the_radial_p_harmonic_field() {
    let man = euclid(3);
    let mut errs = Vec::new();
    for n in [65, 129, 257] {
        let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, n).unwrap()));
        let bc = Dirichlet::ends(&g, 1.0, 0.0).unwrap();
        let (u, _) = solve_dirichlet(&EnergySpec::new(3.0, 1e-12).unwrap(), &g, &bc, &fixed_eps(1e-12)).unwrap();
        let exact = radial_p_harmonic_on(&g, 3.0, 1.0, 0.0).unwrap();
        errs.push(u.values().iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
    }
    assert!(errs[2] < 1e-4, "{errs:?}");
    assert!(errs[0] / errs[2] > 8.0, "{errs:?}");
}

#[test]
fn linear_data_gives_a_linear_solution_in_2d() {
    let g = Arc::new(Grid::from(Grid2D::new((0.0, 1.0), (0.0, 1.0), 17, 17).unwrap()));
    let bc = Dirichlet::on_boundary(&g, |x, y| 0.5 + x - 2.0 * y).unwrap();
    let (u, _) = solve_dirichlet(&EnergySpec::new(3.0, 1e-4).unwrap(), &g, &bc, &fixed_eps(1e-4)).unwrap();
    for (k, v) in u.values().iter().enumerate() {
        let (x, y) = g.point(k);
        assert!((v - (0.5 + x - 2.0 * y)).abs() < 1e-8);
    }
}

#[test]
fn regularized_solution_sandwiches_the_exact_energy() {
    let man = euclid(3);
    let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, 129).unwrap()));
    let bc = Dirichlet::ends(&g, 1.0, 0.0).unwrap();
    let (u0, _) = solve_dirichlet(&EnergySpec::new(4.0, 1e-14).unwrap(), &g, &bc, &fixed_eps(1e-14)).unwrap();
    let (ue, _) = solve_dirichlet(&EnergySpec::new(4.0, 1e-2).unwrap(), &g, &bc, &fixed_eps(1e-2)).unwrap();
    let s = sandwich_check(4.0, 1e-2, &u0, &ue).unwrap();
    assert!(s.ok, "{s:?}");
    assert!(s.e_p_u < s.e_peps_ueps);
}

#[test]
fn numeric_capacity_on_an_exponential_end() {
    let man = ModelManifold::warped_product(2, WarpFunction::Exponential { beta: 1.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
    let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, 0.0, 3.0, 1025).unwrap()));
    let num = capacity_numeric(&g, 2.0, &Condenser::interval(&g).unwrap(), &SolveConfig::default()).unwrap();
    let exact = capacity_analytic(&man, 2.0, 0.0, 3.0).unwrap();
    assert!((num.value - exact.value).abs() < 1e-3 * exact.value);
    let u = num.extremal.unwrap();
    assert!((energy(&EnergySpec::raw(2.0).unwrap(), &u) - num.value).abs() < 1e-12 * num.value);
}

#[test]
fn exponential_warp_has_no_two_end_barrier() {
    let man = ModelManifold::warped_product(2, WarpFunction::Exponential { beta: 1.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
    assert!(matches!(two_end_barrier(&man, 2.0, 50.0, 401), Err(Error::NoBarrier(_))));
}

#[test]
fn tabulated_warp_ends_come_from_tail_laws() {
    let samples: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let t = -10.0 + 0.5 * f64::from(k);
            (t, 1.0 + t * t)
        })
        .collect();
    let warp = TabulatedWarp::new(&samples).unwrap();
    let full = |w: TabulatedWarp| ModelManifold::warped_product(3, WarpFunction::Tabulated(w), f64::NEG_INFINITY, f64::INFINITY, 0.0);
    assert!(full(warp.clone()).is_err());
    let law = TailLaw::Power { exponent: 2.0 };
    let man = full(warp.with_tail(Direction::Plus, law).with_tail(Direction::Minus, law)).unwrap();
    // A ~ t^4, so the 3-resistance of each end is finite and the 5-resistance is not.
    assert_eq!(man.classify_end(3.0, Direction::Plus).unwrap(), EndType::Hyperbolic);
    assert_eq!(man.classify_end(5.0, Direction::Minus).unwrap(), EndType::Parabolic);
}

#[test]
fn q_energy_of_the_finite_energy_profile() {
    let man = ModelManifold::warped_product(3, WarpFunction::PolyEven { alpha: 2.0 }, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
    let b = two_end_barrier(&man, 3.0, 1e4, 4001).unwrap();
    let phi: Vec<f64> = b.field.values().iter().map(|h| h * PI).collect();
    let u = DiscreteField::new(b.field.grid_arc(), phi).unwrap();
    assert!((q_energy(&u, 3.0).unwrap() - PI).abs() < 1e-3);
}
