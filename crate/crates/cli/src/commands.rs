use std::sync::Arc;

use plap_core::capacity::{
    capacity_analytic, capacity_numeric, end_barrier_sweep, p_poincare_bound, tail_energy_profile, volume_growth_check, Condenser,
};
use plap_core::energy::q_energy;
use plap_core::field::RadialPower;
use plap_core::solver::{epsilon_continuation, geometric_schedule, solve_dirichlet, solve_from, two_end_barrier, Dirichlet, SolveConfig};
use plap_core::verifiers::{
    bochner_residual, bochner_s_residual, caccioppoli_check, example_gallery, gallery_item, kappa, kato_ratio, log_annulus_2d, monotonicity_suite,
    regularization_suite, strong_form_residual, weighted_caccioppoli_check, weighted_poincare_check, CutoffShape, GalleryId, KappaVariant,
    KatoOptions, ResidualOptions, VerifierReport,
};
use plap_core::{Direction, DiscreteField, EnergySpec, Grid, Grid1D, ModelManifold};

use crate::battery;
use crate::config::{load_manifold, RunFile};
use crate::output::{field_csv, num, Csv, Output, Summary};
use crate::{Cli, CliError, Command, EndArgs, GalleryArg, GalleryField, Interval, KappaArg, Method, ShapeArg, Verify, DEFAULT_SEED};

type Res<T = ()> = Result<T, CliError>;

fn check_n(n: usize) -> Res {
    if n < 8 {
        return Err(CliError::Usage(format!("resolution {n} is below the minimum of 8")));
    }
    Ok(())
}

fn check_p(p: f64) -> Res {
    EnergySpec::raw(p)?;
    Ok(())
}

fn interval_grid(iv: &Interval) -> Res<(ModelManifold, Arc<Grid>)> {
    check_p(iv.p)?;
    check_n(iv.n)?;
    let m = load_manifold(&iv.manifold)?;
    let g = Arc::new(Grid::from(Grid1D::on_manifold(&m, iv.a, iv.b, iv.n)?));
    Ok((m, g))
}

/// Prints the summary, writes every file and turns a failed verdict into exit code 1.
fn finish(mut out: Output, summary: Summary, pass: bool, what: &str) -> Res {
    let text = summary.render();
    print!("{text}");
    out.add("summary.txt", text);
    out.write()?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(what.into()))
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Res {
    let run = RunFile::load(cli.config.as_deref())?;
    let mut out = Output::new(cli.out.clone());
    let mut s = Summary::default();
    match &cli.command {
        Command::Solve { interval, eps, ua, ub } => {
            let (_, g) = interval_grid(interval)?;
            let cfg = run.solve_config()?;
            let spec = EnergySpec::new(interval.p, *eps)?;
            let bc = Dirichlet::ends(&g, *ua, *ub)?;
            let (u, report) = solve_dirichlet(&spec, &g, &bc, &cfg)?;
            let step = &report.steps[0];
            s.num("p", interval.p);
            s.num("eps", *eps);
            s.text("iterations", step.iterations.to_string());
            s.num("residual", step.residual);
            s.num("energy_p", step.energy_p);
            s.num("energy_p_eps", step.energy_eps);
            out.add("solution.csv", field_csv(&u).into_string());
            finish(out, s, true, "")
        }
        Command::Continuation { interval, eps0, steps, reference_eps } => {
            let (_, g) = interval_grid(interval)?;
            let mut cfg = run.solve_config()?;
            if run.eps_schedule.is_none() {
                cfg.eps_schedule = geometric_schedule(*eps0, *steps);
                cfg.validate()?;
            }
            let bc = Dirichlet::ends(&g, 1.0, 0.0)?;
            let (fields, mut report) = epsilon_continuation(interval.p, &g, &bc, &cfg)?;
            if let Some(eps) = reference_eps {
                let last = fields.last().ok_or(plap_core::Error::NoData)?;
                let fine = SolveConfig { eps_schedule: vec![*eps], ..cfg.clone() };
                let (reference, _) = solve_from(&EnergySpec::new(interval.p, *eps)?, &g, &bc, last.values().to_vec(), &fine)?;
                report.attach_reference(&fields, &reference)?;
            }
            let mut csv = Csv::new(&["eps", "E_p", "E_p_eps", "w1p_dist_to_final"]);
            for st in &report.steps {
                csv.row(&[num(st.eps), num(st.energy_p), num(st.energy_eps), num(st.w1p_dist_to_final.unwrap_or(f64::NAN))]);
            }
            let monotone = report.distances_monotone(0.1);
            let sandwich = report.sandwich_ok();
            s.num("p", interval.p);
            s.text("steps", report.steps.len().to_string());
            s.flag("distances_monotone", monotone);
            s.flag("sandwich_ok", sandwich);
            if let Some(d) = report.steps.last().and_then(|st| st.w1p_dist_to_final) {
                s.num("final_w1p_dist", d);
            }
            out.add("continuation.csv", csv.into_string());
            if let Some(u) = fields.last() {
                out.add("solution.csv", field_csv(u).into_string());
            }
            finish(out, s, monotone && sandwich, "continuation distances or sandwich chain")
        }
        Command::Capacity { interval, method } => {
            let (m, g) = interval_grid(interval)?;
            let p = interval.p;
            s.num("p", p);
            let mut analytic = None;
            if *method != Method::Numeric {
                let c = capacity_analytic(&m, p, interval.a, interval.b)?.value;
                s.num("capacity_analytic", c);
                analytic = Some(c);
            }
            if *method != Method::Analytic {
                let c = capacity_numeric(&g, p, &Condenser::interval(&g)?, &run.solve_config()?)?;
                s.num("capacity_numeric", c.value);
                if let Some(a) = analytic {
                    s.num("relative_difference", (c.value - a).abs() / a);
                }
                if let Some(u) = &c.extremal {
                    out.add("extremal.csv", field_csv(u).into_string());
                }
            }
            finish(out, s, true, "")
        }
        Command::Classify { manifold, p } => {
            check_p(*p)?;
            let m = load_manifold(manifold)?;
            for dir in [Direction::Plus, Direction::Minus] {
                if m.domain().unbounded(dir) {
                    s.text(&format!("end_{}", dir.name()), format!("{:?}", m.classify_end(*p, dir)?));
                }
            }
            finish(out, s, true, "")
        }
        Command::Barrier { manifold, p, two_end, half_width, n, r0, radii } => {
            check_p(*p)?;
            check_n(*n)?;
            let m = load_manifold(manifold)?;
            if *two_end {
                let b = two_end_barrier(&m, *p, *half_width, *n)?;
                s.num("sup", b.sup);
                s.num("inf", b.inf);
                s.flag("strictly_between", b.strictly_between);
                s.num("energy", b.energy);
                s.num("energy_exact", b.energy_exact);
                out.add("barrier.csv", field_csv(&b.field).into_string());
                finish(out, s, b.strictly_between, "barrier leaves (0, 1)")
            } else {
                let radii = radii.clone().unwrap_or_else(battery::sweep_radii);
                let sweep = end_barrier_sweep(&m, *p, *r0, &radii, *n)?;
                let mut csv = Csv::new(&["R", "deviation"]);
                for (r, d) in sweep.radii.iter().zip(&sweep.deviations) {
                    csv.row(&[num(*r), num(*d)]);
                }
                s.text("diagnosis", format!("{:?}", sweep.diagnosis));
                s.text("integral_test", format!("{:?}", sweep.integral_test));
                s.num("limit_energy", sweep.limit_energy);
                out.add("barrier.csv", csv.into_string());
                finish(out, s, true, "")
            }
        }
        Command::Decay { end } => {
            let (m, lambda_p) = end_setup(end)?;
            let t = tail_energy_profile(&m, end.p, end.r0, lambda_p, &end.radii)?;
            let mut csv = Csv::new(&["R", "tail", "bound", "pass"]);
            for r in &t.rows {
                csv.row(&[num(r.r), num(r.measured), num(r.bound), r.pass.to_string()]);
            }
            s.num("lambda_p", lambda_p);
            s.num("constant", t.constant);
            s.num("log_slope", t.slope);
            s.num("slope_bound", t.slope_bound);
            s.flag("monotone", t.monotone);
            s.flag("pass", t.pass);
            out.add("decay.csv", csv.into_string());
            finish(out, s, t.pass, "tail-energy bound")
        }
        Command::Volume { end } => {
            let (m, lambda_p) = end_setup(end)?;
            let v = volume_growth_check(&m, end.p, lambda_p, &end.radii)?;
            let mut csv = Csv::new(&["R", "measured", "bound", "pass"]);
            for r in &v.rows {
                csv.row(&[num(r.r), num(r.measured), num(r.bound), r.pass.to_string()]);
            }
            s.text("end", format!("{:?}", v.end));
            s.num("lambda_p", lambda_p);
            s.num("constant", v.constant);
            s.flag("asserted", v.asserted);
            s.flag("pass", v.pass);
            out.add("volume.csv", csv.into_string());
            finish(out, s, v.pass, "volume growth bound")
        }
        Command::Verify { which } => verify(which, &run, out, s),
        Command::Gallery => gallery(out, s),
        Command::Report { seed, only } => {
            let seed = seed.or(run.seed).unwrap_or(DEFAULT_SEED);
            let outcomes = match only {
                None => battery::run_all(seed),
                Some(ids) => {
                    let mut v = Vec::new();
                    for id in ids {
                        v.push(battery::run_one(id, seed).ok_or_else(|| CliError::Usage(format!("unknown criterion {id}")))?);
                    }
                    v
                }
            };
            let mut csv = Csv::new(&["criterion", "check", "value", "threshold", "pass"]);
            let mut all = true;
            s.text("seed", seed.to_string());
            for o in &outcomes {
                for r in &o.rows {
                    csv.row(&[o.id.into(), r.check.clone(), num(r.value), num(r.threshold), r.pass.to_string()]);
                }
                s.text(&format!("criterion_{}", o.id), if o.pass() { "pass" } else { "fail" });
                all &= o.pass();
            }
            out.add("report.csv", csv.into_string());
            finish(out, s, all, "one or more criteria")
        }
    }
}

fn end_setup(end: &EndArgs) -> Res<(ModelManifold, f64)> {
    check_p(end.p)?;
    let m = load_manifold(&end.manifold)?;
    let lambda_p = match (end.lambda2, end.lambda_p) {
        (Some(l2), None) => p_poincare_bound(l2, end.p)?,
        (None, Some(lp)) => lp,
        _ => return Err(CliError::Usage("give exactly one of --lambda2 and --lambda-p".into())),
    };
    Ok((m, lambda_p))
}

fn gallery_field(f: &GalleryField) -> Res<(DiscreteField, Option<Vec<bool>>)> {
    check_n(f.n)?;
    let id = match f.gallery {
        GalleryArg::Log2d => {
            let (u, mask) = log_annulus_2d(f.n, 1.0, 2.0)?;
            return Ok((u, Some(mask)));
        }
        GalleryArg::A => GalleryId::LogRadial,
        GalleryArg::B => GalleryId::PowerRadial,
        GalleryArg::CConstant => GalleryId::Constant,
        GalleryArg::CLinear => GalleryId::Linear,
        GalleryArg::D => GalleryId::FiniteEnergy,
    };
    Ok((gallery_item(id, f.p, f.m, f.n)?.field, None))
}

fn report_csv(reports: &[&VerifierReport]) -> String {
    let mut csv = Csv::new(&["check", "min", "max", "threshold", "pass"]);
    for r in reports {
        csv.row(&[r.quantity.clone(), num(r.min), num(r.max), num(r.threshold), r.pass.to_string()]);
    }
    csv.into_string()
}

fn summarize(s: &mut Summary, r: &VerifierReport) {
    s.text("check", r.quantity.clone());
    s.num("min", r.min);
    s.num("max", r.max);
    s.num("mean", r.mean);
    s.num("threshold", r.threshold);
    s.num("scale", r.scale);
    s.text("excluded", r.excluded.to_string());
    for (k, v) in &r.extra {
        s.num(k, *v);
    }
    s.flag("pass", r.pass);
}

fn single(mut out: Output, mut s: Summary, r: VerifierReport) -> Res {
    summarize(&mut s, &r);
    out.add("verify.csv", report_csv(&[&r]));
    let pass = r.pass;
    finish(out, s, pass, &r.quantity)
}

fn verify(which: &Verify, run: &RunFile, mut out: Output, mut s: Summary) -> Res {
    match which {
        Verify::Kato { field, analytic, collar } => {
            check_p(field.p)?;
            let (u, region) = gallery_field(field)?;
            let r = kato_ratio(&u, field.p, &KatoOptions { region, collar: *collar, analytic: *analytic, ..Default::default() })?;
            single(out, s, r)
        }
        Verify::StrongForm { field } => {
            check_p(field.p)?;
            let (u, region) = gallery_field(field)?;
            single(out, s, strong_form_residual(&u, field.p, &ResidualOptions { region, ..Default::default() })?)
        }
        Verify::Bochner { p, m, eps, n } => {
            check_p(*p)?;
            check_n(*n)?;
            let man = ModelManifold::radial_euclidean(*m, 0.0, f64::INFINITY)?;
            let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 2.0, *n)?));
            let cfg = SolveConfig { eps_schedule: vec![*eps], ..run.solve_config()? };
            let (u, _) = solve_dirichlet(&EnergySpec::new(*p, *eps)?, &g, &Dirichlet::ends(&g, 1.0, 0.0)?, &cfg)?;
            single(out, s, bochner_residual(&u, *p, *eps, &ResidualOptions { collar: 3, ..Default::default() })?)
        }
        Verify::BochnerS { field, s: exponent, eps } => {
            check_p(field.p)?;
            let (u, _) = gallery_field(field)?;
            single(out, s, bochner_s_residual(&u, field.p, *exponent, *eps, 1e-8)?)
        }
        Verify::Caccioppoli { p, m, shape, n } => {
            check_p(*p)?;
            check_n(*n)?;
            let man = ModelManifold::radial_euclidean(*m, 0.0, f64::INFINITY)?;
            let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, 1.0, 10.0, *n)?));
            let mf = f64::from(*m);
            // The radial p-harmonic field r^k, or 1 + log r when p = m; positive on [1, 10].
            let prof = if *p == mf { RadialPower { k: 0.0, scale: 1.0, offset: 1.0 } } else { RadialPower::new((p - mf) / (p - 1.0)) };
            let w = DiscreteField::from_radial(&g, Arc::new(prof))?;
            let shape = match shape {
                ShapeArg::Linear => CutoffShape::Linear,
                ShapeArg::Smoothstep => CutoffShape::Smoothstep,
                ShapeArg::Cosine => CutoffShape::Cosine,
            };
            let psi = shape.field(&g, 1.0, 2.0, 9.0, 10.0)?;
            single(out, s, caccioppoli_check(&w, &psi, *p, 1e-10)?)
        }
        Verify::WeightedCaccioppoli { manifold, p, tau, kappa: kv, eps1, eps2, r, eps, n } => {
            check_p(*p)?;
            check_n(*n)?;
            let man = load_manifold(manifold)?;
            let variant = match kv {
                KappaArg::Standard => KappaVariant::Standard,
                KappaArg::Refined => KappaVariant::Refined,
                KappaArg::Weak => KappaVariant::Weak,
            };
            let k = kappa(*p, man.m(), variant)?;
            let g = Arc::new(Grid::from(Grid1D::on_manifold(&man, -2.0 * r, 2.0 * r, *n)?));
            let cfg = SolveConfig { eps_schedule: vec![*eps], ..run.solve_config()? };
            let (u, _) = solve_dirichlet(&EnergySpec::new(*p, *eps)?, &g, &Dirichlet::ends(&g, 0.0, 1.0)?, &cfg)?;
            s.num("kappa", k);
            single(out, s, weighted_caccioppoli_check(&man, *p, &u, *eps, k, *tau, *eps1, *eps2, *r)?)
        }
        Verify::Monotonicity { p, samples, seed } => {
            let seed = seed.or(run.seed).unwrap_or(DEFAULT_SEED);
            let rows = monotonicity_suite(p, *samples, seed)?;
            let mut csv = Csv::new(&["p", "samples", "negative_lhs", "zero_lhs_unequal", "c_emp", "fresh_violations", "pass"]);
            let mut pass = true;
            for r in &rows {
                csv.row(&[
                    num(r.p),
                    r.samples.to_string(),
                    r.negative_lhs.to_string(),
                    r.zero_lhs_unequal.to_string(),
                    num(r.c_emp),
                    r.fresh_violations.to_string(),
                    r.pass.to_string(),
                ]);
                s.num(&format!("c_emp_p{}", r.p), r.c_emp);
                pass &= r.pass;
            }
            s.text("seed", seed.to_string());
            s.flag("pass", pass);
            out.add("verify.csv", csv.into_string());
            finish(out, s, pass, "monotonicity inequality")
        }
        Verify::Regularization { samples, seed } => {
            let seed = seed.or(run.seed).unwrap_or(DEFAULT_SEED);
            let rows = regularization_suite(&[(1.0, 2.0), (2.0, 4.0), (4.0, 6.0)], *samples, seed)?;
            let mut csv = Csv::new(&["lo", "hi", "samples", "violations", "max_excess", "pass"]);
            let mut pass = true;
            for r in &rows {
                csv.row(&[num(r.lo), num(r.hi), r.samples.to_string(), r.violations.to_string(), num(r.max_excess), r.pass.to_string()]);
                s.text(&format!("violations_p_{}_{}", r.lo, r.hi), r.violations.to_string());
                pass &= r.pass;
            }
            s.text("seed", seed.to_string());
            s.flag("pass", pass);
            out.add("verify.csv", csv.into_string());
            finish(out, s, pass, "regularization inequality")
        }
        Verify::Poincare { manifold, n } => {
            check_n(*n)?;
            let man = load_manifold(manifold)?;
            let family = cosine_bumps(&man, *n)?;
            single(out, s, weighted_poincare_check(&man, &family, 1e-6)?)
        }
    }
}

/// `cos(πt/2L)` on `[-L, L]` for `L = 1, 2, 4`, clipped to the domain.
fn cosine_bumps(man: &ModelManifold, n: usize) -> Res<Vec<DiscreteField>> {
    let d = man.domain();
    let mut family = Vec::new();
    for half in [1.0, 2.0, 4.0] {
        if d.lo > -half || d.hi < half {
            continue;
        }
        let g = Arc::new(Grid::from(Grid1D::on_manifold(man, -half, half, n)?));
        family.push(DiscreteField::from_fn(&g, |t, _| if t.abs() < half { (std::f64::consts::FRAC_PI_2 * t / half).cos() } else { 0.0 })?);
    }
    if family.is_empty() {
        return Err(CliError::Usage("the domain does not contain [-1, 1]".into()));
    }
    Ok(family)
}

fn gallery(mut out: Output, mut s: Summary) -> Res {
    let mut csv = Csv::new(&["item", "name", "p", "m", "kato_expected", "kato_min", "kato_max", "q_energy_expected", "q_energy", "pass"]);
    let mut all = true;
    for item in example_gallery()? {
        let analytic = item.id == GalleryId::FiniteEnergy;
        let kato = match kato_ratio(&item.field, item.p, &KatoOptions { analytic, ..Default::default() }) {
            Ok(r) => Some((r.min, r.max)),
            Err(plap_core::Error::NoData) => None,
            Err(e) => return Err(e.into()),
        };
        let kato_ok = match (item.expected.kato_ratio, kato) {
            (None, None) => true,
            (Some(e), Some((lo, hi))) if e.is_infinite() => lo == e && hi == e,
            // +inf marks nodes where |grad |du|| vanishes, e.g. at a critical point of |du|.
            (Some(e), Some((lo, hi))) => (lo - e).abs() <= 1e-3 * e && ((hi - e).abs() <= 1e-3 * e || hi.is_infinite()),
            _ => false,
        };
        let (q, qe) = item.expected.q_energy.unwrap_or((item.p, f64::NAN));
        let measured = q_energy(&item.field, q)?;
        let q_ok = qe.is_nan() || (measured - qe).abs() <= 1e-3 * qe.max(1.0);
        let pass = kato_ok && q_ok;
        all &= pass;
        let (kmin, kmax) = kato.unwrap_or((f64::NAN, f64::NAN));
        csv.row(&[
            item.id.label().into(),
            format!("\"{}\"", item.name),
            num(item.p),
            item.m.to_string(),
            num(item.expected.kato_ratio.unwrap_or(f64::NAN)),
            num(kmin),
            num(kmax),
            num(qe),
            num(measured),
            pass.to_string(),
        ]);
        s.flag(&format!("item_{}", item.id.label()), pass);
    }
    out.add("gallery.csv", csv.into_string());
    finish(out, s, all, "gallery values")
}
