use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const EUCLID3: &str = "variant = \"euclidean\"\nm = 3\n";
const EXP2: &str = "variant = \"warped\"\nm = 2\ndomain = [-inf, inf]\n[warp]\nkind = \"exponential\"\nbeta = 1.0\n";
const COSH4: &str = "variant = \"warped\"\nm = 4\n[warp]\nkind = \"cosh\"\n";
const POLY3: &str = "variant = \"warped\"\nm = 3\n[warp]\nkind = \"poly_even\"\nalpha = 2.0\n";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn plap(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plap")).arg("--out").arg(out).args(args).env_remove("PLAP_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap_or_else(|| panic!("{key} missing from\n{text}"));
    line.split(" = ").nth(1).unwrap().parse().unwrap()
}

#[test]
fn capacity_prints_analytic_and_numeric() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "euclid3.cfg", EUCLID3);
    let out = dir.path().join("out");
    let o = plap(&out, &["capacity", "--manifold", &m, "--p", "2", "--a", "1", "--b", "2", "--n", "2048"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((value(&s, "capacity_analytic") - 25.1327).abs() < 1e-4);
    assert!(value(&s, "relative_difference") < 5e-3);
    assert_eq!(fs::read_to_string(out.join("summary.txt")).unwrap(), s);
    assert!(fs::read_to_string(out.join("extremal.csv")).unwrap().starts_with("t,value,grad_norm,weight\n"));
}

#[test]
fn kato_on_power_field() {
    let dir = TempDir::new().unwrap();
    let o = plap(dir.path(), &["verify", "kato", "--gallery", "b", "--p", "3", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((value(&s, "min") - 7.0 / 3.0).abs() < 1e-3);
    assert!((value(&s, "threshold") - 1.999).abs() < 1e-12);
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.starts_with("check,min,max,threshold,pass\nkato_ratio,"));
}

#[test]
fn invalid_exponent_is_exit_2_without_files() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.toml", EUCLID3);
    let out = dir.path().join("out");
    let o = plap(&out, &["solve", "--manifold", &m, "--p", "0.5", "--a", "1", "--b", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn usage_errors_are_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(plap(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(plap(dir.path(), &["capacity", "--p", "2"]).status.code(), Some(2));
    assert_eq!(plap(dir.path(), &["--help"]).status.code(), Some(0));
    let m = write(dir.path(), "m.toml", "variant = \"euclidean\"\nm = 3\nbogus = 1\n");
    assert_eq!(plap(dir.path(), &["classify", "--manifold", &m, "--p", "2"]).status.code(), Some(2));
    let m = write(dir.path(), "e.toml", EUCLID3);
    let o = plap(dir.path(), &["solve", "--manifold", &m, "--p", "2", "--a", "1", "--b", "2", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_convergence_is_exit_3() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.toml", EUCLID3);
    let cfg = write(dir.path(), "run.toml", "max_newton_iters = 1\n");
    let o = plap(dir.path(), &["--config", &cfg, "solve", "--manifold", &m, "--p", "4", "--a", "1", "--b", "2", "--eps", "1e-12"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_verifier_is_exit_1_with_reports() {
    let dir = TempDir::new().unwrap();
    let o = plap(dir.path(), &["verify", "strong-form", "--gallery", "b", "--n", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("verify.csv").exists());
    assert!(stdout(&o).contains("pass = false"));
}

#[test]
fn infeasible_weighted_constants_are_exit_2() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "cosh.toml", COSH4);
    let out = dir.path().join("out");
    let o = plap(&out, &["verify", "weighted-caccioppoli", "--manifold", &m, "--p", "2", "--tau", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("constants infeasible"));
    assert!(!out.exists());
}

#[test]
fn continuation_csv_columns() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.toml", EUCLID3);
    let o = plap(dir.path(), &["continuation", "--manifold", &m, "--p", "3", "--a", "1", "--b", "2", "--n", "65", "--steps", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("continuation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,E_p,E_p_eps,w1p_dist_to_final"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn decay_and_volume_on_exponential_end() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.toml", EXP2);
    let o = plap(dir.path(), &["decay", "--manifold", &m, "--p", "2", "--lambda2", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    assert!(csv.starts_with("R,tail,bound,pass\n"));
    assert_eq!(csv.lines().count(), 10);
    assert!(value(&stdout(&o), "log_slope") <= -1.0 / 6.0);
    let o = plap(dir.path(), &["volume", "--manifold", &m, "--p", "2", "--lambda2", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("end = Hyperbolic"));
}

#[test]
fn classify_and_two_end_barrier() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.toml", POLY3);
    let o = plap(dir.path(), &["classify", "--manifold", &m, "--p", "3"]);
    assert_eq!(stdout(&o), "end_+inf = Hyperbolic\nend_-inf = Hyperbolic\n");
    let o = plap(dir.path(), &["barrier", "--manifold", &m, "--p", "3", "--two-end"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((value(&s, "energy") - std::f64::consts::PI.powi(-2)).abs() < 5e-3 * std::f64::consts::PI.powi(-2));
    let e = write(dir.path(), "e.toml", EUCLID3);
    let o = plap(dir.path(), &["barrier", "--manifold", &e, "--p", "3"]);
    assert!(stdout(&o).contains("diagnosis = Parabolic"));
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(["verify", "regularization", "--samples", "200"])
        .env("PLAP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("verify.csv").exists());
}

#[test]
fn seeded_suites_are_byte_stable() {
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["verify", "monotonicity", "--samples", "2000", "--seed", "11"];
    plap(a.path(), &args);
    plap(b.path(), &args);
    plap(c.path(), &["verify", "monotonicity", "--samples", "2000", "--seed", "12"]);
    let read = |d: &TempDir| fs::read(d.path().join("verify.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn gallery_and_partial_report() {
    let dir = TempDir::new().unwrap();
    assert_eq!(plap(dir.path(), &["gallery"]).status.code(), Some(0));
    assert!(fs::read_to_string(dir.path().join("gallery.csv")).unwrap().lines().count() == 6);
    let o = plap(dir.path(), &["report", "--only", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("criterion_9 = fail"));
    assert_eq!(plap(dir.path(), &["report", "--only", "99"]).status.code(), Some(2));
}
