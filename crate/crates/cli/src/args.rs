use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// 5 pi / 36, the tilt used throughout the reference scenario.
pub const DEFAULT_THETA: f64 = 0.436_332_312_998_582_4;
/// 2 pi / 9.
pub const DEFAULT_DELTA_STD: f64 = 0.698_131_700_797_731_8;

#[derive(Debug, Parser)]
#[command(name = "ysqht", version, about = "Yule-Simpson reversal in noisy polarization-measurement discrimination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form probabilities, thresholds and the reversal verdict.
    Theory(TheoryArgs),
    /// Emulate the photon-counting acquisition and write a JSON-lines count log.
    Simulate(SimulateArgs),
    /// Estimate ratios and aggregated data from a count log.
    Analyze(AnalyzeArgs),
    /// Write an analytic (and optionally simulated) sweep table as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Tilt of hypothesis B.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    /// Standard deviation of the preparation tilt.
    #[arg(long)]
    pub delta_std: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Read angles in degrees instead of radians.
    #[arg(long)]
    pub degrees: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Exit with status 3 when the reversal is present.
    #[arg(long)]
    pub check_reversal: bool,
}

#[derive(Debug, Args)]
pub struct AcquisitionArgs {
    #[arg(long, default_value_t = DEFAULT_THETA, allow_negative_numbers = true)]
    pub theta: f64,
    /// Number of acquisition iterations.
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    /// Expected counts per second at unit detection probability.
    #[arg(long, default_value_t = 1e4)]
    pub rate: f64,
    /// Counting window in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// Generator seed; falls back to $YSQHT_SEED.
    #[arg(long, env = "YSQHT_SEED")]
    pub seed: Option<u64>,
    /// Read angles in degrees instead of radians.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub acquisition: AcquisitionArgs,
    #[arg(long, default_value_t = DEFAULT_DELTA_STD)]
    pub delta_std: f64,
    /// Output count log.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Stochastic,
    Expected,
}

impl From<Mode> for ysqht_core::AggregationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Stochastic => ysqht_core::AggregationMode::Stochastic,
            Mode::Expected => ysqht_core::AggregationMode::Expected,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Count log written by `simulate`.
    pub log: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 0.8)]
    pub gamma2: f64,
    #[arg(long, value_enum, default_value_t = Mode::Stochastic)]
    pub mode: Mode,
    /// Seed of the aggregation draws; falls back to $YSQHT_SEED, then to the
    /// seed recorded in the log.
    #[arg(long, env = "YSQHT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Delta,
    Gamma2,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub axis: Axis,
    /// Grid as MIN:MAX:POINTS, e.g. 0:1.1:23.
    pub range: String,
    #[command(flatten)]
    pub acquisition: AcquisitionArgs,
    /// Noise level for a gamma2 sweep.
    #[arg(long, default_value_t = DEFAULT_DELTA_STD)]
    pub delta_std: f64,
    /// One or more comma-separated values.
    #[arg(long, default_value = "0.1")]
    pub gamma1: String,
    /// Fixed gamma2 for a delta sweep.
    #[arg(long, default_value_t = 0.8)]
    pub gamma2: f64,
    /// Add Monte Carlo columns.
    #[arg(long)]
    pub with_sim: bool,
    #[arg(long, value_enum, default_value_t = Mode::Stochastic)]
    pub mode: Mode,
    #[arg(long)]
    pub out: PathBuf,
}
