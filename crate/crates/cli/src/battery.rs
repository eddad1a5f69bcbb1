//! The criterion battery run by `plap report` and the acceptance tests.

use std::f64::consts::PI;
use std::sync::Arc;

use plap_core::capacity::{capacity_numeric, end_barrier_sweep, p_poincare_bound, tail_energy_profile, volume_growth_check, Condenser};
use plap_core::energy::q_energy;
use plap_core::solver::{epsilon_continuation, geometric_schedule, solve_from, two_end_barrier, Dirichlet, SolveConfig};
use plap_core::verifiers::{
    bochner_residual, bochner_s_residual, caccioppoli_check, fitted_order, gallery_item, kappa, kato_ratio, log_annulus_2d, monotonicity_suite,
    observed_orders, regularization_suite, strong_form_residual, weighted_caccioppoli_check, weighted_constants, CutoffShape, GalleryId,
    KappaVariant, KatoOptions, ResidualOptions,
};
use plap_core::{Direction, DiscreteField, EndType, EnergySpec, Error, Grid, Grid1D, ModelManifold, WarpFunction};

use crate::output::num;

/// One line of evidence: a named quantity, its threshold and verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub check: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Row {
    fn at_most(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, threshold, pass: value <= threshold }
    }

    fn at_least(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, threshold, pass: value >= threshold }
    }

    fn flag(check: impl Into<String>, ok: bool) -> Self {
        Self { check: check.into(), value: if ok { 1.0 } else { 0.0 }, threshold: 1.0, pass: ok }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub rows: Vec<Row>,
    pub note: String,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let failed: Vec<&str> = self.rows.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
        let mut s = format!("[{verdict}] {:>2} {}", self.id, self.title);
        if !failed.is_empty() {
            s.push_str(&format!(" (failed: {})", failed.join(", ")));
        }
        if !self.note.is_empty() {
            s.push_str(&format!(" - {}", self.note.trim_end_matches([';', ' '])));
        }
        s
    }
}

type Res<T> = Result<T, Error>;

fn euclid(m: u32) -> ModelManifold {
    ModelManifold::radial_euclidean(m, 0.0, f64::INFINITY).expect("valid manifold")
}

fn warped(m: u32, warp: WarpFunction) -> ModelManifold {
    ModelManifold::warped_product(m, warp, f64::NEG_INFINITY, f64::INFINITY, 0.0).expect("valid manifold")
}

fn grid_on(m: &ModelManifold, a: f64, b: f64, n: usize) -> Res<Arc<Grid>> {
    Ok(Arc::new(Grid::from(Grid1D::on_manifold(m, a, b, n)?)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn capture(id: &'static str, title: &'static str, f: impl FnOnce(&mut Vec<Row>, &mut String) -> Res<()>) -> Outcome {
    let mut rows = Vec::new();
    let mut note = String::new();
    if let Err(e) = f(&mut rows, &mut note) {
        rows.push(Row::flag(format!("error: {e}"), false));
    }
    Outcome { id, title, rows, note }
}

pub fn capacity_oracle() -> Outcome {
    capture("1", "capacity oracles", |rows, _| {
        let cfg = SolveConfig::default();
        let g = grid_on(&euclid(3), 1.0, 2.0, 2048)?;
        let c = capacity_numeric(&g, 2.0, &Condenser::interval(&g)?, &cfg)?;
        rows.push(Row::at_most("euclid3_p2_rel_err", rel(c.value, 8.0 * PI), 5e-3));
        let w = warped(3, WarpFunction::PolyEven { alpha: 2.0 });
        let g = grid_on(&w, -1.0, 1.0, 2048)?;
        let c = capacity_numeric(&g, 3.0, &Condenser::interval(&g)?, &cfg)?;
        rows.push(Row::at_most("poly_even_p3_rel_err", rel(c.value, (PI / 2.0).powi(-2)), 5e-3));
        Ok(())
    })
}

pub fn eps_convergence() -> Outcome {
    capture("2", "epsilon continuation converges and sandwiches hold", |rows, note| {
        let g = grid_on(&euclid(3), 1.0, 2.0, 257)?;
        let bc = Dirichlet::ends(&g, 1.0, 0.0)?;
        let cfg = SolveConfig { eps_schedule: geometric_schedule(1.0, 30), ..Default::default() };
        for p in [1.5, 3.0, 4.0] {
            let (fields, mut report) = epsilon_continuation(p, &g, &bc, &cfg)?;
            let last = fields.last().expect("non-empty schedule");
            let fine = SolveConfig { eps_schedule: vec![1e-14], ..cfg.clone() };
            let (reference, _) = solve_from(&EnergySpec::new(p, 1e-14)?, &g, &bc, last.values().to_vec(), &fine)?;
            report.attach_reference(&fields, &reference)?;
            let dists: Vec<f64> = report.steps.iter().filter_map(|s| s.w1p_dist_to_final).collect();
            rows.push(Row::flag(format!("p{p}_monotone_10pct"), report.distances_monotone(0.1)));
            rows.push(Row::at_most(format!("p{p}_final_w1p_dist"), *dists.last().expect("steps"), 1e-5));
            rows.push(Row::flag(format!("p{p}_sandwich_all_steps"), report.sandwich_ok()));
            note.push_str(&format!("p={p}: final dist {}; ", num(*dists.last().expect("steps"))));
        }
        Ok(())
    })
}

pub fn kato_sharpness() -> Outcome {
    capture("3", "Kato ratios of the sharp examples", |rows, _| {
        let (u, mask) = log_annulus_2d(512, 1.0, 2.0)?;
        let r = kato_ratio(&u, 2.0, &KatoOptions { region: Some(mask), collar: 2, ..Default::default() })?;
        rows.push(Row::at_most("log_m2_2d_max_dev", (r.min - 2.0).abs().max((r.max - 2.0).abs()), 1e-3));
        let item = gallery_item(GalleryId::PowerRadial, 3.0, 4, 512)?;
        let r = kato_ratio(&item.field, 3.0, &KatoOptions::default())?;
        let target = 7.0 / 3.0;
        rows.push(Row::at_most("power_p3_m4_max_dev", (r.min - target).abs().max((r.max - target).abs()), 1e-3));
        Ok(())
    })
}

pub fn kato_lower_bound() -> Outcome {
    capture("4", "Kato lower bound on every gallery field", |rows, _| {
        for p in [1.5, 2.0, 3.0, 4.0] {
            for m in 2..=5u32 {
                let id = if p == f64::from(m) { GalleryId::LogRadial } else { GalleryId::PowerRadial };
                let item = gallery_item(id, p, m, 512)?;
                let r = kato_ratio(&item.field, p, &KatoOptions::default())?;
                let k = kappa(p, m, KappaVariant::Refined)?;
                rows.push(Row::at_least(format!("{}_p{p}_m{m}_min_ratio", id.label()), r.min, 1.0 + k - 1e-3));
            }
        }
        let item = gallery_item(GalleryId::Linear, 2.0, 2, 33)?;
        let r = kato_ratio(&item.field, 2.0, &KatoOptions::default())?;
        rows.push(Row::flag("linear_vacuous", r.pass && r.min.is_infinite()));
        let item = gallery_item(GalleryId::FiniteEnergy, 3.0, 3, 4001)?;
        let r = kato_ratio(&item.field, 3.0, &KatoOptions { analytic: true, ..Default::default() })?;
        rows.push(Row::at_least("d_p3_m3_min_ratio", r.min, 1.0 + kappa(3.0, 3, KappaVariant::Refined)? - 1e-3));
        Ok(())
    })
}

pub fn bochner() -> Outcome {
    capture("5", "Bochner residuals", |rows, note| {
        let (p, eps) = (3.0, 1e-2);
        let man = euclid(3);
        let cfg = SolveConfig { eps_schedule: vec![eps], ..Default::default() };
        let (mut hs, mut es) = (vec![], vec![]);
        for n in [256, 512, 1024, 2048] {
            let g = grid_on(&man, 1.0, 2.0, n)?;
            let bc = Dirichlet::ends(&g, 1.0, 0.0)?;
            let start = DiscreteField::from_fn(&g, |t, _| 2.0 - t)?;
            let (u, _) = solve_from(&EnergySpec::new(p, eps)?, &g, &bc, start.into_values(), &cfg)?;
            let r = bochner_residual(&u, p, eps, &ResidualOptions { collar: 3, ..Default::default() })?;
            hs.push(g.spacing());
            es.push(r.max);
        }
        let order = fitted_order(&hs, &es)?;
        rows.push(Row::at_least("solver_output_fitted_order", order, 0.8));
        let worst = observed_orders(&hs, &es)?.into_iter().fold(f64::INFINITY, f64::min);
        note.push_str(&format!("errors {}..{}, pairwise min order {}; ", num(es[0]), num(es[3]), num(worst)));
        let item = gallery_item(GalleryId::PowerRadial, 3.0, 4, 257)?;
        let r = bochner_s_residual(&item.field, 3.0, 1.0, 1e-3, 1e-8)?;
        rows.push(Row::at_most("bochner_s_field_b_scaled", r.max, 1e-8));
        Ok(())
    })
}

pub fn strong_form() -> Outcome {
    capture("6", "strong-form residual converges at second order", |rows, _| {
        for (id, p, m) in [(GalleryId::LogRadial, 2.0, 2u32), (GalleryId::PowerRadial, 3.0, 4u32)] {
            let (mut hs, mut es) = (vec![], vec![]);
            for n in [128, 256, 512, 1024] {
                let item = gallery_item(id, p, m, n)?;
                let r = strong_form_residual(&item.field, p, &ResidualOptions::default())?;
                hs.push(item.field.grid().spacing());
                es.push(r.max);
            }
            rows.push(Row::at_least(format!("{}_fitted_order", id.label()), fitted_order(&hs, &es)?, 1.8));
        }
        Ok(())
    })
}

pub fn monotonicity(seed: u64, samples: usize) -> Outcome {
    capture("7", "vector monotonicity inequality", |rows, note| {
        for row in monotonicity_suite(&[1.5, 2.0, 3.0, 4.0], samples, seed)? {
            rows.push(Row::at_most(format!("p{}_negative_lhs", row.p), row.negative_lhs as f64, 0.0));
            rows.push(Row::at_most(format!("p{}_zero_lhs_unequal", row.p), row.zero_lhs_unequal as f64, 0.0));
            rows.push(Row::at_most(format!("p{}_fresh_violations", row.p), row.fresh_violations as f64, 0.0));
            rows.push(Row::at_least(format!("p{}_c_emp", row.p), row.c_emp, f64::MIN_POSITIVE));
            note.push_str(&format!("C_emp(p={})={}; ", row.p, num(row.c_emp)));
        }
        Ok(())
    })
}

pub fn regularization(seed: u64, samples: usize) -> Outcome {
    capture("8", "regularization inequality with explicit constants", |rows, _| {
        for row in regularization_suite(&[(1.0, 2.0), (2.0, 4.0), (4.0, 6.0)], samples, seed)? {
            rows.push(Row::at_most(format!("p_in_({},{}]_violations", row.lo, row.hi), row.violations as f64, 0.0));
        }
        Ok(())
    })
}

pub fn caccioppoli() -> Outcome {
    capture("9", "Caccioppoli estimates", |rows, note| {
        let g = grid_on(&euclid(3), 1.0, 10.0, 901)?;
        let w = DiscreteField::from_radial(&g, Arc::new(plap_core::field::RadialPower::new(-1.0)))?;
        for shape in [CutoffShape::Linear, CutoffShape::Smoothstep, CutoffShape::Cosine] {
            let psi = shape.field(&g, 1.0, 2.0, 9.0, 10.0)?;
            let r = caccioppoli_check(&w, &psi, 2.0, 1e-10)?;
            let margin = r.extra("margin").unwrap_or(f64::NAN);
            rows.push(Row::at_least(format!("plain_{shape:?}_margin").to_lowercase(), margin, 0.0));
        }
        let (p, tau, r) = (2.0, 1.5, 1.0);
        let cosh = warped(4, WarpFunction::Cosh);
        let k = kappa(p, 4, KappaVariant::Standard)?;
        let sup_c = 4.0 * (p - 1.0 + k) / (p * p) - tau;
        note.push_str(&format!("kappa={}, sup over eps1,eps2 of C = {}; ", num(k), num(sup_c)));
        let g = grid_on(&cosh, -2.0 * r, 2.0 * r, 401)?;
        let bc = Dirichlet::ends(&g, 0.0, 1.0)?;
        let (u, _) = plap_core::solver::solve_dirichlet(&EnergySpec::new(p, 1e-3)?, &g, &bc, &SolveConfig::default())?;
        match weighted_caccioppoli_check(&cosh, p, &u, 1e-3, k, tau, 0.01, 0.01, r) {
            Ok(rep) => rows.push(Row::at_least("weighted_cosh_m4_margin", rep.extra("margin").unwrap_or(f64::NAN), 0.0)),
            Err(Error::ConstantsInfeasible { c }) => rows.push(Row::at_least("weighted_cosh_m4_constant_C", c, f64::MIN_POSITIVE)),
            Err(e) => return Err(e),
        }
        let infeasible = matches!(weighted_constants(p, k, tau, 0.01, 1.0 - 1e-6), Err(Error::ConstantsInfeasible { .. }))
            && matches!(weighted_constants(p, 1.0, 0.5, 0.01, 1.0 - 1e-6), Err(Error::ConstantsInfeasible { .. }));
        rows.push(Row::flag("infeasible_when_eps2_near_1", infeasible));
        Ok(())
    })
}

/// Radii for barrier sweeps: far enough that log-divergent resistances push
/// the deviation below the parabolic threshold.
pub fn sweep_radii() -> Vec<f64> {
    (1..=30).map(|k| 10f64.powi(10 * k + 7)).collect()
}

pub fn end_classification() -> Outcome {
    capture("10", "end classification agrees with barrier sweeps", |rows, _| {
        let radii = sweep_radii();
        let mut cases: Vec<(String, ModelManifold, f64)> = Vec::new();
        for m in 2..=4u32 {
            let mut ps = vec![1.5, 2.0, 3.0, 4.0, f64::from(m)];
            ps.dedup();
            ps.sort_by(f64::total_cmp);
            ps.dedup();
            for p in ps {
                cases.push((format!("euclid_m{m}_p{p}"), euclid(m), p));
            }
        }
        for p in [1.5, 2.0, 3.0, 4.0] {
            cases.push((format!("exp_m2_p{p}"), warped(2, WarpFunction::Exponential { beta: 1.0 }), p));
            cases.push((format!("cosh_m4_p{p}"), warped(4, WarpFunction::Cosh), p));
            cases.push((format!("poly_even1_m2_p{p}"), warped(2, WarpFunction::PolyEven { alpha: 1.0 }), p));
        }
        for (name, man, p) in cases {
            let class = man.classify_end(p, Direction::Plus)?;
            let sweep = end_barrier_sweep(&man, p, 10.0, &radii, 17);
            let agree = matches!(&sweep, Ok(s) if s.diagnosis == class);
            rows.push(Row::flag(format!("{name}_agree"), agree));
            if let ModelManifold::RadialEuclidean { m, .. } = man {
                rows.push(Row::flag(format!("{name}_parabolic_iff_p_ge_m"), (class == EndType::Parabolic) == (p >= f64::from(m))));
            }
        }
        Ok(())
    })
}

pub fn decay_and_volume() -> Outcome {
    capture("11", "tail-energy decay and volume growth", |rows, note| {
        let man = warped(2, WarpFunction::Exponential { beta: 1.0 });
        let p = 2.0;
        let lambda_p = p_poincare_bound(0.25, p)?;
        let radii: Vec<f64> = (2..=10).map(f64::from).collect();
        let tail = tail_energy_profile(&man, p, 1.0, lambda_p, &radii)?;
        rows.push(Row::at_most("tail_log_slope", tail.slope, tail.slope_bound));
        rows.push(Row::flag("tail_bound_all_R", tail.rows.iter().all(|r| r.pass)));
        let vol = volume_growth_check(&man, p, lambda_p, &radii)?;
        rows.push(Row::flag("shell_volume_lower_bound", vol.pass && vol.asserted));
        note.push_str(&format!("slope {}, C3 {}", num(tail.slope), num(tail.constant)));
        Ok(())
    })
}

pub fn finite_energy_example() -> Outcome {
    capture("12", "finite q-energy example", |rows, _| {
        let item = gallery_item(GalleryId::FiniteEnergy, 3.0, 3, 4001)?;
        rows.push(Row::at_most("E3_abs_err", (q_energy(&item.field, 3.0)? - PI).abs(), 1e-3));
        let man = warped(3, WarpFunction::PolyEven { alpha: 2.0 });
        for dir in [Direction::Minus, Direction::Plus] {
            rows.push(Row::flag(format!("end_{}_hyperbolic", dir.name()), man.classify_end(3.0, dir)? == EndType::Hyperbolic));
        }
        let b = two_end_barrier(&man, 3.0, 1e4, 4001)?;
        rows.push(Row::at_most("barrier_sup_err", (b.sup - 1.0).abs(), 1e-3));
        rows.push(Row::at_most("barrier_inf_err", b.inf.abs(), 1e-3));
        rows.push(Row::at_most("barrier_energy_rel_err", rel(b.energy, PI.powi(-2)), 5e-3));
        Ok(())
    })
}

/// Runs one criterion by id (`"1"` to `"12"`).
pub fn run_one(id: &str, seed: u64) -> Option<Outcome> {
    Some(match id {
        "1" => capacity_oracle(),
        "2" => eps_convergence(),
        "3" => kato_sharpness(),
        "4" => kato_lower_bound(),
        "5" => bochner(),
        "6" => strong_form(),
        "7" => monotonicity(seed, 100_000),
        "8" => regularization(seed, 10_000),
        "9" => caccioppoli(),
        "10" => end_classification(),
        "11" => decay_and_volume(),
        "12" => finite_energy_example(),
        _ => return None,
    })
}

/// Criteria 1-12 in order; determinism is checked by rerunning the report.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    vec![
        capacity_oracle(),
        eps_convergence(),
        kato_sharpness(),
        kato_lower_bound(),
        bochner(),
        strong_form(),
        monotonicity(seed, 100_000),
        regularization(seed, 10_000),
        caccioppoli(),
        end_classification(),
        decay_and_volume(),
        finite_energy_example(),
    ]
}
