use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwrs_core::scenery::TailFamily;

#[derive(Debug, Parser)]
#[command(name = "rwrs", version, about = "Exceedance point processes of random walks in random sceneries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Range growth R_[nt] against its linear limit.
    RangeLaw(RangeLawArgs),
    /// Estimate the normalizing constant of the walk's regime.
    Calibrate(CalibrateArgs),
    /// Dump rescaled exceedance point patterns.
    Simulate(SimulateArgs),
    /// Check counts against the Poisson limit (alpha <= 1).
    VerifyPoisson(VerifyPoissonArgs),
    /// Check counts against the Cox limit (1 < alpha <= 2).
    VerifyCox(VerifyCoxArgs),
    /// Block-leader estimate of the extremal index.
    ExtremalIndex(BlockArgs),
    /// O'Brien's extremal index of the scenery itself.
    Obrien(BlockArgs),
    /// Gap between P(max <= u_n) and its block approximation.
    Theorem6(BlockArgs),
    /// Anti-clustering sums D' and D^k.
    Mixing(MixingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkKind {
    Zeta,
    Lazy,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixingKind {
    DprimeScenery,
    DprimeRwrs,
    Dinfty,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat key = value file; flags given on the command line win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Walk family; by default lazy at alpha = 2 and zeta otherwise.
    #[arg(long, value_enum)]
    pub walk: Option<WalkKind>,
    /// Stability index of the step law.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Holding probability of the lazy walk.
    #[arg(long, default_value_t = 0.5)]
    pub laziness: f64,
    /// frechet:B, weibull:D, gumbel-exp or gumbel-gauss; defaults to
    /// frechet:2, or gumbel-gauss for the AR(1) scenery.
    #[arg(long, value_parser = parse_tail)]
    pub tail: Option<TailFamily>,
    /// iid, ar1:RHO or moving-max:WINDOW.
    #[arg(long, default_value = "iid")]
    pub scenery: String,
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all results are independent of this value.
    #[arg(long, env = "RWRS_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
    /// Leave the runtime_ms column empty so reruns are byte-identical.
    #[arg(long)]
    pub no_runtime: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RegimeArgs {
    /// Replicas of the calibration run.
    #[arg(long, default_value_t = 200)]
    pub calibration_replicas: u64,
    /// Use this q instead of calibrating (transient walks).
    #[arg(long)]
    pub q_hat: Option<f64>,
    /// Use this h(n) instead of calibrating (alpha = 1).
    #[arg(long)]
    pub h_hat: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    /// Time window a,b of a query set; repeatable.
    #[arg(long = "window", value_name = "A,B")]
    pub windows: Vec<String>,
    /// Height interval lo,hi (hi may be inf); one for all windows or one per window.
    #[arg(long = "height", value_name = "LO,HI")]
    pub heights: Vec<String>,
    /// Width of the verdict bands in standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RangeLawArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub regime: RegimeArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1")]
    pub fractions: Vec<f64>,
    /// Relative tolerance on R_[nt] / (n q) against t.
    #[arg(long, default_value_t = 0.03)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub regime: RegimeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyPoissonArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    pub query: QueryArgs,
    /// Skip the correlation checks on disjoint query sets.
    #[arg(long)]
    pub no_independence: bool,
    #[arg(long, default_value_t = 0.01)]
    pub gof_level: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyCoxArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub query: QueryArgs,
    /// Resolution N of the Cox reference walk; 10 n by default.
    #[arg(long)]
    pub resolution: Option<u64>,
    /// Replicas of the Cox reference; the experiment's count by default.
    #[arg(long)]
    pub cox_replicas: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// u_n is set so that n P(xi > u_n) is about tau.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Fixed threshold; overrides --tau.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Number of blocks; n^0.6 by default.
    #[arg(long)]
    pub k_n: Option<u64>,
    /// Stripe width; n^0.2 by default.
    #[arg(long)]
    pub l_n: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct BlockArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MixingArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long, value_enum)]
    pub which: MixingKind,
    /// Lags k of the D^k table.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    pub k: Vec<u64>,
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Self::RangeLaw(a) => &a.common,
            Self::Calibrate(a) => &a.common,
            Self::Simulate(a) => &a.common,
            Self::VerifyPoisson(a) => &a.common,
            Self::VerifyCox(a) => &a.common,
            Self::ExtremalIndex(a) | Self::Obrien(a) | Self::Theorem6(a) => &a.common,
            Self::Mixing(a) => &a.common,
        }
    }
}

fn parse_tail(s: &str) -> Result<TailFamily, String> {
    s.parse().map_err(|e: rwrs_core::Error| e.to_string())
}
