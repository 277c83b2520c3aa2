//! Linear-polarization qubit states and the channels acting on them.
//!
//! Every state and projector in this problem is real, so a density operator
//! is stored as its Bloch vector restricted to the x-z plane. The linear
//! polarization `|0>_b = cos b |0> + sin b |1>` sits at `(sin 2b, cos 2b)`,
//! and a rotation of the polarization by `a` is a rotation of the Bloch
//! vector by `2a`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Slack allowed on the Bloch norm and on probabilities before a value is
/// treated as invalid rather than rounded.
pub const POSITIVITY_EPS: f64 = 1e-12;

/// An angle in radians. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Angle(radians))
        } else {
            Err(Error::invalid(format!("angle must be finite, got {radians}")))
        }
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Angle::new(degrees.to_radians())
    }

    pub const fn zero() -> Self {
        Angle(0.0)
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Angle::new(value)
    }
}

impl From<Angle> for f64 {
    fn from(angle: Angle) -> f64 {
        angle.0
    }
}

/// A density operator in the linear-polarization plane of the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitState {
    bloch_x: f64,
    bloch_z: f64,
}

impl QubitState {
    pub fn new(bloch_x: f64, bloch_z: f64) -> Result<Self> {
        if !bloch_x.is_finite() || !bloch_z.is_finite() {
            return Err(Error::invalid("Bloch components must be finite"));
        }
        let norm_sq = bloch_x * bloch_x + bloch_z * bloch_z;
        if norm_sq > 1.0 + POSITIVITY_EPS {
            return Err(Error::invalid(format!(
                "Bloch vector ({bloch_x}, {bloch_z}) lies outside the unit disc (norm^2 = {norm_sq})"
            )));
        }
        Ok(QubitState { bloch_x, bloch_z })
    }

    /// The maximally mixed state, centre of the Bloch disc.
    pub const fn maximally_mixed() -> Self {
        QubitState { bloch_x: 0.0, bloch_z: 0.0 }
    }

    pub fn bloch_x(&self) -> f64 {
        self.bloch_x
    }

    pub fn bloch_z(&self) -> f64 {
        self.bloch_z
    }

    pub fn bloch_norm(&self) -> f64 {
        self.bloch_x.hypot(self.bloch_z)
    }

    /// Rotates the polarization by `alpha`, i.e. the Bloch vector by `2 alpha`.
    pub fn rotated(&self, alpha: f64) -> QubitState {
        let (s, c) = (2.0 * alpha).sin_cos();
        QubitState {
            bloch_x: self.bloch_x * c + self.bloch_z * s,
            bloch_z: self.bloch_z * c - self.bloch_x * s,
        }
    }
}

/// Rank-1 projector onto linear polarization at angle `theta`.
///
/// `Analyzer::new(0)` is hypothesis A; a tilted analyzer is hypothesis B.
/// Angles are reduced to `[0, pi)` since `theta` and `theta + pi` describe the
/// same device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Analyzer {
    theta: Angle,
}

impl Analyzer {
    pub fn new(theta: Angle) -> Self {
        let mut reduced = theta.radians().rem_euclid(PI);
        // rem_euclid can round up to exactly PI for tiny negative inputs
        if reduced >= PI {
            reduced = 0.0;
        }
        Analyzer { theta: Angle(reduced) }
    }

    pub fn reference() -> Self {
        Analyzer { theta: Angle::zero() }
    }

    pub fn theta(&self) -> Angle {
        self.theta
    }
}

/// Gaussian preparation noise: standard deviation of the tilt and the
/// resulting contraction `smearing = exp(-2 delta_std^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    delta_std: f64,
    smearing: f64,
}

impl NoiseParams {
    pub fn new(delta_std: f64) -> Result<Self> {
        if !delta_std.is_finite() || delta_std < 0.0 {
            return Err(Error::invalid(format!(
                "noise standard deviation must be finite and non-negative, got {delta_std}"
            )));
        }
        Ok(NoiseParams { delta_std, smearing: (-2.0 * delta_std * delta_std).exp() })
    }

    pub const fn noiseless() -> Self {
        NoiseParams { delta_std: 0.0, smearing: 1.0 }
    }

    /// Standard deviation of the tilt, in radians.
    pub fn delta_std(&self) -> f64 {
        self.delta_std
    }

    pub fn smearing(&self) -> f64 {
        self.smearing
    }

    pub fn is_noiseless(&self) -> bool {
        self.delta_std == 0.0
    }
}

/// The pure state `|0>_beta`.
pub fn pure_state(beta: Angle) -> QubitState {
    let (s, c) = (2.0 * beta.radians()).sin_cos();
    QubitState { bloch_x: s, bloch_z: c }
}

/// Born-rule probability of the "0" outcome of `analyzer` on `state`.
pub fn born_probability(state: &QubitState, analyzer: &Analyzer) -> f64 {
    let (s, c) = (2.0 * analyzer.theta.radians()).sin_cos();
    let raw = 0.5 * (1.0 + state.bloch_x * s + state.bloch_z * c);
    // |raw - 1/2| <= |bloch|/2, so the state invariant bounds the overshoot
    debug_assert!(
        (-POSITIVITY_EPS..=1.0 + POSITIVITY_EPS).contains(&raw),
        "probability {raw} out of range"
    );
    raw.clamp(0.0, 1.0)
}

/// Gaussian phase diffusion: contracts the Bloch plane by the smearing factor.
pub fn dephase(state: &QubitState, noise: &NoiseParams) -> QubitState {
    let d = noise.smearing;
    QubitState { bloch_x: d * state.bloch_x, bloch_z: d * state.bloch_z }
}

/// Convex mixture `gamma * clean + (1 - gamma) * noisy`.
pub fn mix(gamma: f64, clean: &QubitState, noisy: &QubitState) -> Result<QubitState> {
    let gamma = check_probability("gamma", gamma)?;
    let rest = 1.0 - gamma;
    Ok(QubitState {
        bloch_x: gamma * clean.bloch_x + rest * noisy.bloch_x,
        bloch_z: gamma * clean.bloch_z + rest * noisy.bloch_z,
    })
}
