//! Quantum hypothesis testing of a polarization-measurement box under
//! Gaussian preparation noise.
//!
//! The crate is split along the lines of the workflow:
//!
//! * [`qubit`] holds linear-polarization qubit states, analyzers, the
//!   phase-diffusion and mixing channels and the Born rule.
//! * [`quadrature`] integrates the phase-diffusion average numerically and is
//!   used as an independent check of the closed-form channel.
//! * [`ys`] evaluates the outcome probabilities, the Yule-Simpson reversal
//!   predicate, its thresholds and the analytic sweep curves.
//! * [`sim`] emulates the photon-counting acquisition with seeded Poisson
//!   counts and turns count records into ratio estimates.
//! * [`io`] owns the count-log, manifest and sweep-table formats.

pub mod error;
pub mod estimate;
pub mod io;
pub mod qubit;
pub mod quadrature;
pub mod sim;
pub mod ys;

pub use error::{Error, Result};
pub use estimate::RatioEstimate;
pub use qubit::{born_probability, dephase, mix, pure_state, Analyzer, Angle, NoiseParams, QubitState};
pub use quadrature::dephase_oracle;
pub use sim::{
    acquire_iteration, aggregate, estimate_ratios, run_acquisition, simulate_sweep, AcquisitionConfig,
    AcquisitionRecord, AggregationMode,
};
pub use ys::{
    delta_threshold, gamma2_threshold, outcome_probabilities, small_angle_threshold, sweep_delta, sweep_gamma2,
    ys_reversal, OutcomeProbabilities, ScenarioParams, Threshold, YsVerdict,
};
