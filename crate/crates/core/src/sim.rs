//! Seeded emulation of the photon-counting acquisition.
//!
//! Each iteration draws one Gaussian tilt `alpha` and records four photon
//! counts behind a 45 degree polarizer after a phase shift `phi`:
//!
//! | count | phi              | estimates |
//! |-------|------------------|-----------|
//! | n1p   | 0                | p1 = 1    |
//! | n1q   | 2 theta          | q1        |
//! | n2p   | -2 alpha         | p2        |
//! | n2q   | 2 (theta - alpha)| q2        |
//!
//! The detection probability is `(1 + cos phi) / 2` and counts are Poisson
//! with mean `rate * window * probability`. `n1p` normalizes the other three.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::estimate::{mean_estimate, poisson_ratio, ratio_of_means, RatioEstimate};
use crate::qubit::{Angle, NoiseParams};

pub const DEFAULT_ITERATIONS: usize = 200;
pub const DEFAULT_MEAN_RATE: f64 = 1e4;
pub const DEFAULT_WINDOW_SECONDS: f64 = 1.0;

/// Below this expected count per window the ratio estimators get noisy.
pub const RECOMMENDED_MIN_EXPECTED_COUNTS: f64 = 100.0;

/// Multiplier for deriving per-grid-point seeds (an odd 64-bit constant).
pub const SWEEP_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

const AGGREGATION_SALT: u64 = 0xA5A5_5A5A_C3C3_3C3C;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcquisitionConfig {
    pub iterations: usize,
    /// Expected counts per second at unit detection probability.
    pub mean_rate: f64,
    pub window_seconds: f64,
    pub theta: Angle,
    pub noise: NoiseParams,
    pub seed: u64,
}

impl AcquisitionConfig {
    /// Defaults: 200 iterations of 1 s windows at 10^4 counts/s.
    pub fn new(theta: Angle, noise: NoiseParams, seed: u64) -> Self {
        AcquisitionConfig {
            iterations: DEFAULT_ITERATIONS,
            mean_rate: DEFAULT_MEAN_RATE,
            window_seconds: DEFAULT_WINDOW_SECONDS,
            theta,
            noise,
            seed,
        }
    }

    /// Expected counts per window at unit probability.
    pub fn expected_counts(&self) -> f64 {
        self.mean_rate * self.window_seconds
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if !(self.mean_rate.is_finite() && self.mean_rate > 0.0) {
            return Err(Error::invalid(format!("mean_rate must be positive, got {}", self.mean_rate)));
        }
        if !(self.window_seconds.is_finite() && self.window_seconds > 0.0) {
            return Err(Error::invalid(format!("window_seconds must be positive, got {}", self.window_seconds)));
        }
        let lambda = self.expected_counts();
        if !lambda.is_finite() {
            return Err(Error::invalid("mean_rate * window_seconds overflows"));
        }
        if lambda < RECOMMENDED_MIN_EXPECTED_COUNTS {
            log::warn!(
                "expected counts per window {lambda} is below {RECOMMENDED_MIN_EXPECTED_COUNTS}; ratio estimates will be poorly conditioned"
            );
        }
        Ok(())
    }
}

/// One iteration of the acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionRecord {
    pub iteration: usize,
    /// Tilt shared by `n2p` and `n2q`.
    pub alpha: f64,
    pub n1p: u64,
    pub n1q: u64,
    pub n2p: u64,
    pub n2q: u64,
}

impl AcquisitionRecord {
    pub fn new(iteration: usize, alpha: f64, counts: [u64; 4]) -> Self {
        let [n1p, n1q, n2p, n2q] = counts;
        AcquisitionRecord { iteration, alpha, n1p, n1q, n2p, n2q }
    }
}

/// Probability that a photon passes the 45 degree polarizer after a relative
/// H/V phase shift `phi`.
pub fn detection_probability(phi: f64) -> f64 {
    (0.5 * (1.0 + phi.cos())).clamp(0.0, 1.0)
}

/// Phase settings `[0, 2 theta, -2 alpha, 2 (theta - alpha)]` for one iteration.
pub fn phase_settings(theta: Angle, alpha: f64) -> [f64; 4] {
    let t = theta.radians();
    [0.0, 2.0 * t, -2.0 * alpha, 2.0 * (t - alpha)]
}

/// Draws a preparation tilt from a zero-mean Gaussian with standard deviation
/// `noise.delta_std()`.
pub fn sample_alpha<R: Rng + ?Sized>(rng: &mut R, noise: &NoiseParams) -> f64 {
    if noise.is_noiseless() {
        return 0.0;
    }
    Normal::new(0.0, noise.delta_std()).expect("validated standard deviation").sample(rng)
}

/// Poisson count with the given mean; a non-positive mean yields zero.
pub fn sample_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let poisson: Poisson<f64> = Poisson::new(mean).expect("finite positive mean");
    poisson.sample(rng) as u64
}

/// Source of tilts and photon counts for [`acquire_iteration`].
pub trait PhotonSource {
    fn tilt(&mut self, noise: &NoiseParams) -> f64;
    fn count(&mut self, mean: f64) -> u64;
}

/// Gaussian tilts and Poisson counts from a random generator.
#[derive(Debug, Clone)]
pub struct RandomSource<R> {
    rng: R,
}

impl<R: Rng> RandomSource<R> {
    pub fn new(rng: R) -> Self {
        RandomSource { rng }
    }
}

impl RandomSource<ChaCha8Rng> {
    pub fn seeded(seed: u64) -> Self {
        RandomSource { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl<R: Rng> PhotonSource for RandomSource<R> {
    fn tilt(&mut self, noise: &NoiseParams) -> f64 {
        sample_alpha(&mut self.rng, noise)
    }

    fn count(&mut self, mean: f64) -> u64 {
        sample_count(&mut self.rng, mean)
    }
}

/// Draws one tilt and the four counts of one iteration.
pub fn acquire_iteration<S: PhotonSource + ?Sized>(
    source: &mut S,
    config: &AcquisitionConfig,
    iteration: usize,
) -> AcquisitionRecord {
    let alpha = source.tilt(&config.noise);
    let lambda = config.expected_counts();
    let counts = phase_settings(config.theta, alpha).map(|phi| source.count(lambda * detection_probability(phi)));
    AcquisitionRecord::new(iteration, alpha, counts)
}

/// Runs `config.iterations` iterations from a generator seeded with
/// `config.seed`. Bitwise reproducible for a fixed configuration.
pub fn run_acquisition(config: &AcquisitionConfig) -> Result<Vec<AcquisitionRecord>> {
    config.validate()?;
    let mut source = RandomSource::seeded(config.seed);
    Ok((0..config.iterations).map(|i| acquire_iteration(&mut source, config, i)).collect())
}

/// Generator used for stochastic aggregation, decorrelated from the
/// acquisition stream of the same seed.
pub fn aggregation_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ AGGREGATION_SALT)
}

/// Seed of the `index`-th point of a sweep.
pub fn sweep_point_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ (index as u64).wrapping_mul(SWEEP_SEED_STRIDE)
}

/// Summed-count ratios with first-order Poisson errors, as a cross-check on
/// the per-iteration standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonCrossCheck {
    pub q1_over_p1: RatioEstimate,
    pub p2: RatioEstimate,
    pub q2: RatioEstimate,
    pub q2_over_p2: RatioEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimates {
    pub q1_over_p1: RatioEstimate,
    pub p2: RatioEstimate,
    pub q2: RatioEstimate,
    /// Ratio of the `q2` and `p2` means.
    pub q2_over_p2: RatioEstimate,
    /// Iterations dropped because `n1p == 0`.
    pub excluded: usize,
    pub poisson: PoissonCrossCheck,
}

fn usable(records: &[AcquisitionRecord]) -> Result<(Vec<&AcquisitionRecord>, usize)> {
    if records.is_empty() {
        return Err(Error::Estimation("no acquisition records".into()));
    }
    let kept: Vec<_> = records.iter().filter(|r| r.n1p > 0).collect();
    let excluded = records.len() - kept.len();
    if excluded > 0 {
        log::warn!("{excluded} iteration(s) with n1p = 0 excluded from the estimates");
    }
    if kept.is_empty() {
        return Err(Error::Estimation("every iteration has n1p = 0".into()));
    }
    Ok((kept, excluded))
}

/// Per-iteration ratios normalized by `n1p`, averaged over iterations.
pub fn estimate_ratios(records: &[AcquisitionRecord]) -> Result<RatioEstimates> {
    let (kept, excluded) = usable(records)?;
    let norm = |r: &AcquisitionRecord, n: u64| n as f64 / r.n1p as f64;
    let q1: Vec<f64> = kept.iter().map(|r| norm(r, r.n1q)).collect();
    let p2: Vec<f64> = kept.iter().map(|r| norm(r, r.n2p)).collect();
    let q2: Vec<f64> = kept.iter().map(|r| norm(r, r.n2q)).collect();

    let sum = |f: fn(&AcquisitionRecord) -> u64| kept.iter().map(|r| f(r)).sum::<u64>();
    let (s1p, s1q, s2p, s2q) = (sum(|r| r.n1p), sum(|r| r.n1q), sum(|r| r.n2p), sum(|r| r.n2q));
    let poisson = PoissonCrossCheck {
        q1_over_p1: poisson_ratio(s1q, s1p)?,
        p2: poisson_ratio(s2p, s1p)?,
        q2: poisson_ratio(s2q, s1p)?,
        q2_over_p2: poisson_ratio(s2q, s2p)?,
    };

    Ok(RatioEstimates {
        q1_over_p1: mean_estimate(&q1)?,
        p2: mean_estimate(&p2)?,
        q2: mean_estimate(&q2)?,
        q2_over_p2: ratio_of_means(&q2, &p2)?,
        excluded,
        poisson,
    })
}

/// How the clean and noisy counts are mixed into aggregated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    /// Each iteration contributes either its clean or its noisy count, chosen
    /// by a Bernoulli draw with the aggregation weight.
    #[default]
    Stochastic,
    /// Each iteration contributes the weighted average of both counts.
    Expected,
}

impl std::str::FromStr for AggregationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stochastic" => Ok(AggregationMode::Stochastic),
            "expected" => Ok(AggregationMode::Expected),
            other => Err(Error::invalid(format!("unknown aggregation mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AggregationMode::Stochastic => "stochastic",
            AggregationMode::Expected => "expected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub p: RatioEstimate,
    pub q: RatioEstimate,
    pub q_over_p: RatioEstimate,
    pub excluded: usize,
}

/// Mixes the hypothesis-A counts with weights `(gamma1, 1 - gamma1)` and the
/// hypothesis-B counts with `(gamma2, 1 - gamma2)`, normalized by `n1p`.
pub fn aggregate<R: Rng + ?Sized>(
    records: &[AcquisitionRecord],
    gamma1: f64,
    gamma2: f64,
    rng: &mut R,
    mode: AggregationMode,
) -> Result<Aggregate> {
    let gamma1 = check_probability("gamma1", gamma1)?;
    let gamma2 = check_probability("gamma2", gamma2)?;
    let (kept, excluded) = usable(records)?;
    let mut p = Vec::with_capacity(kept.len());
    let mut q = Vec::with_capacity(kept.len());
    for r in kept {
        let norm = r.n1p as f64;
        let (a, b) = match mode {
            AggregationMode::Stochastic => {
                let a = if rng.random_bool(gamma1) { r.n1p } else { r.n2p };
                let b = if rng.random_bool(gamma2) { r.n1q } else { r.n2q };
                (a as f64, b as f64)
            }
            AggregationMode::Expected => (
                gamma1 * r.n1p as f64 + (1.0 - gamma1) * r.n2p as f64,
                gamma2 * r.n1q as f64 + (1.0 - gamma2) * r.n2q as f64,
            ),
        };
        p.push(a / norm);
        q.push(b / norm);
    }
    Ok(Aggregate { p: mean_estimate(&p)?, q: mean_estimate(&q)?, q_over_p: ratio_of_means(&q, &p)?, excluded })
}

/// Grid swept by [`simulate_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum SimAxis {
    /// Noise standard deviations at fixed `gamma2`; the base config's noise is
    /// replaced point by point.
    Delta { grid: Vec<f64>, gamma2: f64 },
    /// `gamma2` values at the base config's noise.
    Gamma2 { grid: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedPoint {
    pub axis_value: f64,
    pub seed: u64,
    pub q1_over_p1: RatioEstimate,
    pub q2_over_p2: RatioEstimate,
    /// One entry per `gamma1`.
    pub q_over_p: Vec<RatioEstimate>,
    pub excluded: usize,
}

/// Runs a fresh acquisition at every grid point and reduces it to the ratios
/// plotted against the analytic curves. Points run in parallel; the output
/// follows grid order.
pub fn simulate_sweep(
    base: &AcquisitionConfig,
    axis: &SimAxis,
    gamma1: &[f64],
    mode: AggregationMode,
) -> Result<Vec<SimulatedPoint>> {
    base.validate()?;
    if gamma1.is_empty() {
        return Err(Error::invalid("at least one gamma1 value is required"));
    }
    for &g in gamma1 {
        check_probability("gamma1", g)?;
    }
    let grid = match axis {
        SimAxis::Delta { grid, gamma2 } => {
            check_probability("gamma2", *gamma2)?;
            grid
        }
        SimAxis::Gamma2 { grid } => grid,
    };
    grid.par_iter()
        .enumerate()
        .map(|(index, &x)| {
            let seed = sweep_point_seed(base.seed, index);
            let (noise, gamma2) = match axis {
                SimAxis::Delta { gamma2, .. } => (NoiseParams::new(x)?, *gamma2),
                SimAxis::Gamma2 { .. } => (base.noise, check_probability("gamma2", x)?),
            };
            let config = AcquisitionConfig { noise, seed, ..*base };
            let records = run_acquisition(&config)?;
            let ratios = estimate_ratios(&records)?;
            let q_over_p = gamma1
                .iter()
                .map(|&g1| {
                    let mut rng = aggregation_rng(seed);
                    aggregate(&records, g1, gamma2, &mut rng, mode).map(|a| a.q_over_p)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SimulatedPoint {
                axis_value: x,
                seed,
                q1_over_p1: ratios.q1_over_p1,
                q2_over_p2: ratios.q2_over_p2,
                q_over_p,
                excluded: ratios.excluded,
            })
        })
        .collect()
}
