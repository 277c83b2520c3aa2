//! Outcome probabilities, the Yule-Simpson reversal and its thresholds.
//!
//! Hypothesis A measures along the reference axis, hypothesis B along an axis
//! tilted by `theta`. The probe is either the clean state `rho0` or its
//! phase-diffused version. With `c = cos 2 theta` and smearing `d`:
//!
//! ```text
//! p1 = 1            q1 = (1 + c) / 2
//! p2 = (1 + d) / 2  q2 = (1 + d c) / 2
//! p  = g1 p1 + (1 - g1) p2
//! q  = g2 q1 + (1 - g2) q2
//! ```
//!
//! A reversal happens when `q > p` although `p1 > q1` and `p2 > q2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::error::{check_probability, Error, Result};
use crate::qubit::{Angle, NoiseParams};

/// Full parameter point: tilt, noise and the two aggregation weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioParams {
    theta: Angle,
    noise: NoiseParams,
    gamma1: f64,
    gamma2: f64,
}

impl ScenarioParams {
    /// `theta` must lie in `[0, pi/2]`; the weights in `[0, 1]`.
    pub fn new(theta: Angle, noise: NoiseParams, gamma1: f64, gamma2: f64) -> Result<Self> {
        check_probability_angle(theta)?;
        let gamma1 = check_probability("gamma1", gamma1)?;
        let gamma2 = check_probability("gamma2", gamma2)?;
        Ok(ScenarioParams { theta, noise, gamma1, gamma2 })
    }

    pub fn theta(&self) -> Angle {
        self.theta
    }

    pub fn noise(&self) -> NoiseParams {
        self.noise
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn with_noise(self, noise: NoiseParams) -> Self {
        ScenarioParams { noise, ..self }
    }

    pub fn with_gamma2(self, gamma2: f64) -> Result<Self> {
        ScenarioParams::new(self.theta, self.noise, self.gamma1, gamma2)
    }
}

fn check_probability_angle(theta: Angle) -> Result<()> {
    let t = theta.radians();
    if (0.0..=FRAC_PI_2).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid(format!("theta must lie in [0, pi/2], got {t}")))
    }
}

/// Thresholds divide by `cos 2 theta` and need `0 < theta < pi/4`.
fn threshold_cos2(theta: Angle) -> Result<f64> {
    let t = theta.radians();
    if !(t > 0.0 && t < FRAC_PI_4) {
        return Err(Error::domain(format!(
            "threshold formulas require 0 < theta < pi/4 (cos 2 theta > 0), got theta = {t}"
        )));
    }
    Ok((2.0 * t).cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeProbabilities {
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
    pub p: f64,
    pub q: f64,
}

impl OutcomeProbabilities {
    pub fn q1_over_p1(&self) -> f64 {
        self.q1 / self.p1
    }

    pub fn q2_over_p2(&self) -> f64 {
        self.q2 / self.p2
    }

    pub fn q_over_p(&self) -> f64 {
        self.q / self.p
    }
}

pub fn outcome_probabilities(params: &ScenarioParams) -> OutcomeProbabilities {
    let c = (2.0 * params.theta.radians()).cos();
    let d = params.noise.smearing();
    let p1 = 1.0;
    let q1 = 0.5 * (1.0 + c);
    let p2 = 0.5 * (1.0 + d);
    let q2 = 0.5 * (1.0 + d * c);
    let p = params.gamma1 * p1 + (1.0 - params.gamma1) * p2;
    let q = params.gamma2 * q1 + (1.0 - params.gamma2) * q2;
    OutcomeProbabilities { p1, q1, p2, q2, p, q }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct YsVerdict {
    /// `(p1 > q1, p2 > q2)`.
    pub partitioned_favor_a: (bool, bool),
    /// `q > p`.
    pub aggregated_favor_b: bool,
    pub reversal: bool,
}

/// Strict comparisons throughout; a tie is not a reversal.
pub fn ys_reversal(params: &ScenarioParams) -> YsVerdict {
    verdict(&outcome_probabilities(params))
}

pub fn verdict(probs: &OutcomeProbabilities) -> YsVerdict {
    let partitioned_favor_a = (probs.p1 > probs.q1, probs.p2 > probs.q2);
    let aggregated_favor_b = probs.q > probs.p;
    YsVerdict {
        partitioned_favor_a,
        aggregated_favor_b,
        reversal: partitioned_favor_a.0 && partitioned_favor_a.1 && aggregated_favor_b,
    }
}

/// A threshold that may lie outside the attainable range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Threshold<T> {
    Reachable(T),
    /// No admissible parameter value produces the reversal.
    Unreachable,
}

impl<T> Threshold<T> {
    pub fn reachable(self) -> Option<T> {
        match self {
            Threshold::Reachable(v) => Some(v),
            Threshold::Unreachable => None,
        }
    }

    pub fn is_reachable(&self) -> bool {
        matches!(self, Threshold::Reachable(_))
    }
}

/// Smallest `gamma2` (exclusive) above which the aggregated data favor B.
///
/// `gamma2 > gamma1 / c + d / (1 - d) * (1 - c) / c`. A threshold of one or
/// more is reported as unreachable.
pub fn gamma2_threshold(gamma1: f64, theta: Angle, noise: &NoiseParams) -> Result<Threshold<f64>> {
    let gamma1 = check_probability("gamma1", gamma1)?;
    let c = threshold_cos2(theta)?;
    let d = noise.smearing();
    if d >= 1.0 {
        return Err(Error::domain(
            "noiseless preparation (smearing = 1) admits no reversal: the gamma2 threshold is undefined",
        ));
    }
    let threshold = gamma1 / c + d / (1.0 - d) * (1.0 - c) / c;
    if threshold >= 1.0 {
        Ok(Threshold::Unreachable)
    } else {
        Ok(Threshold::Reachable(threshold))
    }
}

/// Noise level above which the reversal appears, as a smearing factor and as
/// the corresponding tilt standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseThreshold {
    /// Reversal iff `smearing < this`.
    pub smearing: f64,
    /// Reversal iff `delta_std > this`.
    pub delta_std: f64,
}

/// Bounds on the smearing factor for which some pair of weights yields a
/// reversal at a given tilt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityBounds {
    /// `2 cos 2 theta`, a necessary condition.
    pub loose: f64,
    /// `cos 2 theta`: with `gamma1 = 0, gamma2 -> 1` the reversal exists iff
    /// the smearing is below this value.
    pub tight: f64,
}

impl FeasibilityBounds {
    pub fn for_theta(theta: Angle) -> Result<Self> {
        let c = threshold_cos2(theta)?;
        Ok(FeasibilityBounds { loose: 2.0 * c, tight: c })
    }

    pub fn satisfies_loose(&self, smearing: f64) -> bool {
        smearing < self.loose
    }

    pub fn admits_reversal(&self, smearing: f64) -> bool {
        smearing < self.tight
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaThreshold {
    pub threshold: Threshold<NoiseThreshold>,
    pub feasibility: FeasibilityBounds,
}

/// Noise threshold for fixed weights:
/// `smearing < (gamma1 - gamma2 c) / (gamma1 - 1 - (gamma2 - 1) c)`.
pub fn delta_threshold(gamma1: f64, gamma2: f64, theta: Angle) -> Result<DeltaThreshold> {
    let gamma1 = check_probability("gamma1", gamma1)?;
    let gamma2 = check_probability("gamma2", gamma2)?;
    let c = threshold_cos2(theta)?;
    let feasibility = FeasibilityBounds { loose: 2.0 * c, tight: c };
    let numerator = gamma1 - gamma2 * c;
    let denominator = gamma1 - 1.0 - (gamma2 - 1.0) * c;
    // With gamma2 > gamma1 the denominator is negative; otherwise q <= p for
    // every smearing and the threshold does not exist.
    let threshold = if gamma2 <= gamma1 || denominator >= 0.0 {
        Threshold::Unreachable
    } else {
        let smearing = numerator / denominator;
        if smearing <= 0.0 || smearing >= 1.0 {
            Threshold::Unreachable
        } else {
            Threshold::Reachable(NoiseThreshold { smearing, delta_std: (-smearing.ln() / 2.0).sqrt() })
        }
    };
    Ok(DeltaThreshold { threshold, feasibility })
}

/// Leading-order small-tilt expansion `1 - 2 theta^2 / (gamma2 - gamma1)` of the
/// smearing threshold.
pub fn small_angle_threshold(gamma1: f64, gamma2: f64, theta: Angle) -> Result<f64> {
    let gamma1 = check_probability("gamma1", gamma1)?;
    let gamma2 = check_probability("gamma2", gamma2)?;
    if gamma2 <= gamma1 {
        return Err(Error::domain(format!(
            "small-angle threshold needs gamma2 > gamma1, got gamma1 = {gamma1}, gamma2 = {gamma2}"
        )));
    }
    let t = theta.radians();
    Ok(1.0 - 2.0 * t * t / (gamma2 - gamma1))
}

/// Which parameter a sweep table varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum SweepAxis {
    /// Noise standard deviation at fixed `gamma2`.
    Delta { theta: Angle, gamma2: f64 },
    /// `gamma2` at fixed noise.
    Gamma2 { theta: Angle, noise: NoiseParams },
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Delta { .. } => "delta_std",
            SweepAxis::Gamma2 { .. } => "gamma2",
        }
    }

    /// Scenario at axis value `x` for the given `gamma1`.
    pub fn scenario(&self, x: f64, gamma1: f64) -> Result<ScenarioParams> {
        match *self {
            SweepAxis::Delta { theta, gamma2 } => ScenarioParams::new(theta, NoiseParams::new(x)?, gamma1, gamma2),
            SweepAxis::Gamma2 { theta, noise } => ScenarioParams::new(theta, noise, gamma1, x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub q1_over_p1: f64,
    pub q2_over_p2: f64,
    /// One entry per `gamma1` of the table.
    pub q_over_p: Vec<f64>,
    pub reversal: Vec<bool>,
}

/// Analytic curves evaluated on the exact grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub gamma1: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

/// Where a `q/p` curve crosses one between two adjacent grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub lower: f64,
    pub upper: f64,
    /// Bisection estimate of the crossing, within [`CROSSING_TOLERANCE`].
    pub refined: f64,
}

pub const CROSSING_TOLERANCE: f64 = 1e-6;

fn check_grid(grid: &[f64], lo: f64, hi: f64, what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("{what} grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|x| !(x.is_finite() && **x >= lo && **x <= hi)) {
        return Err(Error::invalid(format!("{what} grid value {bad} outside [{lo}, {hi}]")));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid(format!("{what} grid must be sorted ascending")));
    }
    Ok(())
}

fn sweep(axis: SweepAxis, gamma1: &[f64], grid: &[f64]) -> Result<SweepTable> {
    if gamma1.is_empty() {
        return Err(Error::invalid("at least one gamma1 value is required"));
    }
    let rows = grid
        .iter()
        .map(|&x| {
            let mut q_over_p = Vec::with_capacity(gamma1.len());
            let mut reversal = Vec::with_capacity(gamma1.len());
            let mut partitioned = None;
            for &g1 in gamma1 {
                let params = axis.scenario(x, g1)?;
                let probs = outcome_probabilities(&params);
                q_over_p.push(probs.q_over_p());
                reversal.push(verdict(&probs).reversal);
                partitioned = Some((probs.q1_over_p1(), probs.q2_over_p2()));
            }
            let (q1_over_p1, q2_over_p2) = partitioned.expect("gamma1 is non-empty");
            Ok(SweepRow { axis_value: x, q1_over_p1, q2_over_p2, q_over_p, reversal })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { axis, gamma1: gamma1.to_vec(), rows })
}

/// Analytic ratios as a function of the noise standard deviation.
pub fn sweep_delta(theta: Angle, gamma1: &[f64], gamma2: f64, delta_grid: &[f64]) -> Result<SweepTable> {
    check_probability_angle(theta)?;
    check_probability("gamma2", gamma2)?;
    check_grid(delta_grid, 0.0, f64::MAX, "delta_std")?;
    sweep(SweepAxis::Delta { theta, gamma2 }, gamma1, delta_grid)
}

/// Analytic ratios as a function of `gamma2`, one `q/p` column per `gamma1`.
pub fn sweep_gamma2(theta: Angle, noise: NoiseParams, gamma1: &[f64], gamma2_grid: &[f64]) -> Result<SweepTable> {
    check_probability_angle(theta)?;
    check_grid(gamma2_grid, 0.0, 1.0, "gamma2")?;
    sweep(SweepAxis::Gamma2 { theta, noise }, gamma1, gamma2_grid)
}

impl SweepTable {
    /// Sign changes of `q/p - 1` for the `series`-th `gamma1`, each refined by
    /// bisection on the analytic curve.
    pub fn crossings(&self, series: usize) -> Result<Vec<Crossing>> {
        let gamma1 = *self
            .gamma1
            .get(series)
            .ok_or_else(|| Error::invalid(format!("series {series} out of range")))?;
        let excess = |x: f64| -> Result<f64> { Ok(outcome_probabilities(&self.axis.scenario(x, gamma1)?).q_over_p() - 1.0) };
        let mut out = Vec::new();
        for w in self.rows.windows(2) {
            let (a, b) = (w[0].q_over_p[series] - 1.0, w[1].q_over_p[series] - 1.0);
            if (a <= 0.0) == (b <= 0.0) {
                continue;
            }
            let (mut lo, mut hi) = (w[0].axis_value, w[1].axis_value);
            let lo_sign = a <= 0.0;
            while hi - lo > CROSSING_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if (excess(mid)? <= 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(Crossing { lower: w[0].axis_value, upper: w[1].axis_value, refined: 0.5 * (lo + hi) });
        }
        Ok(out)
    }
}
