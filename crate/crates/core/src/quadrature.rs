//! Numerical evaluation of the phase-diffusion average.
//!
//! The closed-form channel in [`crate::qubit::dephase`] is checked against a
//! direct integration of the Gaussian-weighted Born probability over the tilt
//! angle. The integrator is an adaptive 7/15-point Gauss-Kronrod rule that
//! always splits the sub-interval with the largest error estimate.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubit::{born_probability, Analyzer, NoiseParams, QubitState};

/// Largest noise standard deviation the oracle accepts, in radians.
pub const ORACLE_MAX_DELTA_STD: f64 = 1.2;

/// Half-width of the integration window in units of the standard deviation.
/// The Gaussian mass outside +-8 sigma is about 1.2e-15.
pub const TRUNCATION_SIGMAS: f64 = 8.0;

const ORACLE_TOLERANCE: f64 = 1e-12;
const MAX_SUBINTERVALS: usize = 2000;

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub subintervals: usize,
}

/// State of the integrator when it gave up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureDiagnostics {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub subintervals: usize,
}

impl fmt::Display for QuadratureDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on [{}, {}] estimate {} with error {:e} > tolerance {:e} after {} subintervals",
            self.lower, self.upper, self.estimate, self.abs_error, self.tolerance, self.subintervals
        )
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!("integration bounds must be finite with a < b, got [{a}, {b}]")));
    }
    let mut segments = vec![kronrod_segment(&f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature(QuadratureDiagnostics {
                lower: a,
                upper: b,
                estimate: value,
                abs_error: error,
                tolerance: tol,
                subintervals: segments.len(),
            }));
        }
        if error <= tol {
            return Ok(QuadratureResult { value, abs_error: error, subintervals: segments.len() });
        }
        if segments.len() >= MAX_SUBINTERVALS {
            return Err(Error::Quadrature(QuadratureDiagnostics {
                lower: a,
                upper: b,
                estimate: value,
                abs_error: error,
                tolerance: tol,
                subintervals: segments.len(),
            }));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(kronrod_segment(&f, seg.a, mid));
        segments.push(kronrod_segment(&f, mid, seg.b));
    }
}

/// Born probability of `analyzer` on the phase-diffused `state`, computed by
/// integrating over the Gaussian tilt rather than through the closed form.
pub fn dephase_oracle(state: &QubitState, noise: &NoiseParams, analyzer: &Analyzer) -> Result<f64> {
    let sigma = noise.delta_std();
    if sigma == 0.0 {
        return Ok(born_probability(state, analyzer));
    }
    if sigma > ORACLE_MAX_DELTA_STD {
        return Err(Error::domain(format!(
            "quadrature oracle requires delta_std <= {ORACLE_MAX_DELTA_STD} rad, got {sigma}"
        )));
    }
    let norm = 1.0 / (2.0 * PI * sigma * sigma).sqrt();
    let density = |alpha: f64| norm * (-alpha * alpha / (2.0 * sigma * sigma)).exp();
    let integrand = |alpha: f64| density(alpha) * born_probability(&state.rotated(alpha), analyzer);
    let half_width = TRUNCATION_SIGMAS * sigma;
    let result = integrate(integrand, -half_width, half_width, ORACLE_TOLERANCE)?;
    Ok(result.value)
}
