//! Manifold and run files. Both are TOML documents.
//!
//! ```toml
//! variant = "warped"        # or "euclidean"
//! m = 3
//! domain = [-inf, inf]      # optional; defaults to the full range of the variant
//! ricci_N_lower = 0.0       # optional lower bound on the Ricci curvature of N
//!
//! [warp]
//! kind = "poly_even"        # power | exponential | cosh | poly_even | tabulated
//! alpha = 2.0
//! ```
//!
//! Tabulated warps list `(t, η)` samples. An end may lie beyond the samples
//! only when its growth law is declared:
//!
//! ```toml
//! [warp]
//! kind = "tabulated"
//! samples = [[-2.0, 5.0], [-1.0, 2.0], [0.0, 1.0], [1.0, 2.0], [2.0, 5.0]]
//! tail_plus = { law = "power", exponent = 2.0 }
//! tail_minus = { law = "exponential", rate = 1.0 }
//! ```

use std::path::Path;

use serde::Deserialize;

use plap_core::geometry::{TabulatedWarp, TailLaw};
use plap_core::solver::SolveConfig;
use plap_core::{Direction, ModelManifold, WarpFunction};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Variant {
    Euclidean,
    Warped,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
enum TailSpec {
    Power { exponent: f64 },
    Exponential { rate: f64 },
}

impl From<TailSpec> for TailLaw {
    fn from(t: TailSpec) -> Self {
        match t {
            TailSpec::Power { exponent } => TailLaw::Power { exponent },
            TailSpec::Exponential { rate } => TailLaw::Exponential { rate },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum WarpSpec {
    Power {
        alpha: f64,
        #[serde(default)]
        sigma: f64,
    },
    Exponential {
        #[serde(default = "one")]
        beta: f64,
    },
    Cosh,
    PolyEven {
        alpha: f64,
    },
    Tabulated {
        samples: Vec<[f64; 2]>,
        tail_plus: Option<TailSpec>,
        tail_minus: Option<TailSpec>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldFile {
    variant: Variant,
    m: u32,
    domain: Option<[f64; 2]>,
    #[serde(rename = "ricci_N_lower", default)]
    ricci_n_lower: f64,
    warp: Option<WarpSpec>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_manifold(text: &str) -> Result<ModelManifold, CliError> {
    let f: ManifoldFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let m = match f.variant {
        Variant::Euclidean => {
            if f.warp.is_some() {
                return Err(CliError::Config("euclidean manifolds take no [warp] table".into()));
            }
            let [lo, hi] = f.domain.unwrap_or([0.0, f64::INFINITY]);
            ModelManifold::radial_euclidean(f.m, lo, hi)?
        }
        Variant::Warped => {
            let warp = match f.warp.ok_or_else(|| CliError::Config("warped manifolds need a [warp] table".into()))? {
                WarpSpec::Power { alpha, sigma } => WarpFunction::Power { alpha, sigma },
                WarpSpec::Exponential { beta } => WarpFunction::Exponential { beta },
                WarpSpec::Cosh => WarpFunction::Cosh,
                WarpSpec::PolyEven { alpha } => WarpFunction::PolyEven { alpha },
                WarpSpec::Tabulated { samples, tail_plus, tail_minus } => {
                    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s[0], s[1])).collect();
                    let mut t = TabulatedWarp::new(&pts)?;
                    if let Some(law) = tail_plus {
                        t = t.with_tail(Direction::Plus, law.into());
                    }
                    if let Some(law) = tail_minus {
                        t = t.with_tail(Direction::Minus, law.into());
                    }
                    WarpFunction::Tabulated(t)
                }
            };
            let [lo, hi] = f.domain.unwrap_or([f64::NEG_INFINITY, f64::INFINITY]);
            ModelManifold::warped_product(f.m, warp, lo, hi, f.ricci_n_lower)?
        }
    };
    Ok(m)
}

pub fn load_manifold(path: &Path) -> Result<ModelManifold, CliError> {
    parse_manifold(&read(path)?)
}

/// Optional run file overriding solver settings.
///
/// ```toml
/// eps_schedule = [1.0, 0.5, 0.25]
/// residual_tol = 1e-10
/// max_newton_iters = 50
/// seed = 7
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub eps_schedule: Option<Vec<f64>>,
    pub residual_tol: Option<f64>,
    pub max_newton_iters: Option<usize>,
    pub cg_rel_tol: Option<f64>,
    pub max_cg_iters: Option<usize>,
    pub seed: Option<u64>,
}

impl RunFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => toml::from_str(&read(p)?).map_err(|e| CliError::Config(e.to_string())),
        }
    }

    pub fn solve_config(&self) -> Result<SolveConfig, CliError> {
        let mut cfg = SolveConfig::default();
        if let Some(s) = &self.eps_schedule {
            cfg.eps_schedule = s.clone();
        }
        if let Some(v) = self.residual_tol {
            cfg.residual_tol = v;
        }
        if let Some(v) = self.max_newton_iters {
            cfg.max_newton_iters = v;
        }
        if let Some(v) = self.cg_rel_tol {
            cfg.cg_rel_tol = v;
        }
        if let Some(v) = self.max_cg_iters {
            cfg.max_cg_iters = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_infinite_domain_and_warp() {
        let m = parse_manifold("variant = \"warped\"\nm = 3\ndomain = [-inf, inf]\n[warp]\nkind = \"poly_even\"\nalpha = 2.0\n").unwrap();
        assert_eq!(m.m(), 3);
        assert!(m.domain().hi.is_infinite());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_m() {
        assert!(parse_manifold("variant = \"euclidean\"\nm = 3\nfoo = 1\n").is_err());
        assert!(parse_manifold("variant = \"euclidean\"\nm = 0\n").is_err());
        assert!(parse_manifold("variant = \"warped\"\nm = 3\n").is_err());
    }

    #[test]
    fn tabulated_warp_with_tails() {
        let text = "variant = \"warped\"\nm = 3\n[warp]\nkind = \"tabulated\"\nsamples = [[-2.0, 5.0], [-1.0, 2.0], [0.0, 1.0], [1.0, 2.0], [2.0, 5.0]]\n\
                    tail_plus = { law = \"power\", exponent = 2.0 }\ntail_minus = { law = \"power\", exponent = 2.0 }\n";
        let m = parse_manifold(text).unwrap();
        assert_eq!(m.classify_end(3.0, Direction::Minus).unwrap(), plap_core::EndType::Hyperbolic);
        let bounded = text.replace("tail_minus = { law = \"power\", exponent = 2.0 }\n", "");
        assert!(parse_manifold(&bounded).is_err());
    }
}
