//! Run manifests: the resolved parameter set that produced an output file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result;
use crate::qubit::{Angle, NoiseParams};
use crate::sim::{AcquisitionConfig, AggregationMode};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    /// Subcommand that wrote the file (`simulate`, `sweep`, ...).
    pub command: String,
    pub params: RunParams,
    /// RFC 3339. Not covered by the reproducibility contract.
    pub timestamp: String,
}

/// Angles in radians.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AggregationMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    /// `delta` or `gamma2`.
    pub axis: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub with_sim: bool,
}

impl RunParams {
    /// Acquisition settings recorded by `simulate`, with defaults for any
    /// field the manifest leaves out.
    pub fn acquisition_config(&self) -> Result<AcquisitionConfig> {
        let theta = Angle::new(self.theta)?;
        let noise = NoiseParams::new(self.delta_std.unwrap_or(0.0))?;
        let mut config = AcquisitionConfig::new(theta, noise, self.seed.unwrap_or(0));
        if let Some(n) = self.iterations {
            config.iterations = n;
        }
        if let Some(r) = self.mean_rate {
            config.mean_rate = r;
        }
        if let Some(w) = self.window_seconds {
            config.window_seconds = w;
        }
        config.validate()?;
        Ok(config)
    }
}

impl RunManifest {
    pub fn new(command: &str, params: RunParams, timestamp: String) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool: "ysqht".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params,
            timestamp,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("malformed manifest: {0}")]
    Malformed(String),
    #[error("unsupported manifest schema_version {found} (this build reads version {SCHEMA_VERSION})")]
    UnsupportedVersion { found: u64 },
}

/// Parses a manifest object. The schema version is checked before the rest
/// of the structure, so files from a different schema report a version error.
pub fn parse_manifest(text: &str) -> std::result::Result<RunManifest, ManifestError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ManifestError::Malformed(e.to_string()))?;
    let object = value.as_object().ok_or_else(|| ManifestError::Malformed("manifest must be a JSON object".into()))?;
    let version = object
        .get("schema_version")
        .ok_or_else(|| ManifestError::Malformed("missing schema_version".into()))?
        .as_u64()
        .ok_or_else(|| ManifestError::Malformed("schema_version must be a non-negative integer".into()))?;
    if version != SCHEMA_VERSION as u64 {
        return Err(ManifestError::UnsupportedVersion { found: version });
    }
    serde_json::from_value(value).map_err(|e| ManifestError::Malformed(e.to_string()))
}
