//! `plap`: batch front end for `plap-core`.
//!
//! Every subcommand writes its artifacts to the output directory (`--out`,
//! or `PLAP_OUT_DIR`) and prints its summary to stdout. Exit codes: 0 on
//! success, 1 when a verifier or check fails (reports are still written), 2 on
//! invalid input, 3 when a solve or quadrature does not converge.

pub mod battery;
pub mod config;
pub mod output;

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] plap_core::Error),
    #[error("check failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use plap_core::Error as E;
        match self {
            CliError::Failed(_) | CliError::Core(E::InternalInconsistency(_)) => 1,
            CliError::Core(E::NonConvergence { .. } | E::Quadrature { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "Regularized p-Laplacian experiments on model manifolds")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "PLAP_OUT_DIR", default_value = "plap-out")]
    pub out: PathBuf,
    /// Run file with solver settings and seed.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Interval {
    #[arg(long)]
    pub manifold: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Grid nodes.
    #[arg(long, default_value_t = 257)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Analytic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryArg {
    A,
    B,
    CConstant,
    CLinear,
    D,
    /// `log|x|` on a 2D annulus.
    Log2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KappaArg {
    Standard,
    Refined,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Linear,
    Smoothstep,
    Cosine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Dirichlet problem at fixed epsilon.
    Solve {
        #[command(flatten)]
        interval: Interval,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        ua: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        ub: f64,
    },
    /// Solve along a decreasing epsilon schedule.
    Continuation {
        #[command(flatten)]
        interval: Interval,
        #[arg(long, default_value_t = 1.0)]
        eps0: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Measure distances against a solve at this epsilon instead of the last step.
        #[arg(long)]
        reference_eps: Option<f64>,
    },
    /// p-capacity of the condenser ({a}, {b}).
    Capacity {
        #[command(flatten)]
        interval: Interval,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Classify the ends as p-parabolic or p-hyperbolic.
    Classify {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Barrier exhaustion of the end at +inf, or the two-end barrier.
    Barrier {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        two_end: bool,
        #[arg(long, default_value_t = 1e4)]
        half_width: f64,
        #[arg(long, default_value_t = 4001)]
        n: usize,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        r0: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Tail-energy decay of the limit barrier.
    Decay {
        #[command(flatten)]
        end: EndArgs,
    },
    /// Volume growth of the end at +inf.
    Volume {
        #[command(flatten)]
        end: EndArgs,
    },
    /// Run one verifier.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Evaluate the example gallery.
    Gallery,
    /// Run the full criterion battery.
    Report {
        #[arg(long)]
        seed: Option<u64>,
        /// Criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
}

#[derive(Debug, Args)]
pub struct EndArgs {
    #[arg(long)]
    pub manifold: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub r0: f64,
    /// Spectral gap of the Laplacian; converted to the p-Poincare constant.
    #[arg(long, conflicts_with = "lambda_p")]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub lambda_p: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0])]
    pub radii: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GalleryField {
    #[arg(long, value_enum, default_value_t = GalleryArg::B)]
    pub gallery: GalleryArg,
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub m: u32,
    #[arg(long, default_value_t = 513)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Kato ratio of a gallery field.
    Kato {
        #[command(flatten)]
        field: GalleryField,
        #[arg(long)]
        analytic: bool,
        #[arg(long, default_value_t = 2)]
        collar: usize,
    },
    /// Strong form of the p-Laplace equation on a gallery field.
    StrongForm {
        #[command(flatten)]
        field: GalleryField,
    },
    /// Bochner identity on a solved field of the Euclidean annulus [1, 2].
    Bochner {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 513)]
        n: usize,
    },
    /// Bochner identity for the s-linearization on a radial gallery field.
    BochnerS {
        #[command(flatten)]
        field: GalleryField,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Caccioppoli estimate for the positive radial p-harmonic field on [1, 10].
    Caccioppoli {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, value_enum, default_value_t = ShapeArg::Smoothstep)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 901)]
        n: usize,
    },
    /// Weighted Caccioppoli estimate on a warped product.
    WeightedCaccioppoli {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = KappaArg::Standard)]
        kappa: KappaArg,
        #[arg(long, default_value_t = 0.01)]
        eps1: f64,
        #[arg(long, default_value_t = 0.01)]
        eps2: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 401)]
        n: usize,
    },
    /// Vector monotonicity inequality on seeded samples.
    Monotonicity {
        #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0, 3.0, 4.0])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regularization inequality on seeded samples.
    Regularization {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Weighted Poincare inequality for cosine bumps.
    Poincare {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long, default_value_t = 801)]
        n: usize,
    },
}

/// Default seed for the sampled suites.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("plap: {e}");
            e.exit_code()
        }
    }
}
