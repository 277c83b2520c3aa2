//! JSON-lines count logs.
//!
//! The first line is the [`RunManifest`]; every following line is one
//! iteration:
//!
//! ```text
//! {"i":0,"alpha":-1.2345678901234567e-1,"n1p":10012,"n1q":8190,"n2p":6954,"n2q":6230}
//! ```
//!
//! `alpha` is written with 17 significant digits so it round-trips exactly.

use std::io::{self, BufRead, Write};

use serde::Deserialize;
use thiserror::Error;

use super::manifest::{parse_manifest, ManifestError, RunManifest};
use crate::sim::AcquisitionRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct CountLog {
    pub manifest: RunManifest,
    pub records: Vec<AcquisitionRecord>,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("cannot read count log: {0}")]
    Io(#[from] io::Error),
    /// `line` is 1-based.
    #[error("corrupt count log at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("incompatible count log: {0}")]
    Version(ManifestError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    i: usize,
    alpha: f64,
    n1p: u64,
    n1q: u64,
    n2p: u64,
    n2q: u64,
}

pub fn format_record(record: &AcquisitionRecord) -> String {
    format!(
        r#"{{"i":{},"alpha":{:.16e},"n1p":{},"n1q":{},"n2p":{},"n2q":{}}}"#,
        record.iteration, record.alpha, record.n1p, record.n1q, record.n2p, record.n2q
    )
}

pub fn parse_record_line(line: &str) -> Result<AcquisitionRecord, String> {
    let r: RecordLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if !r.alpha.is_finite() {
        return Err("alpha must be finite".into());
    }
    Ok(AcquisitionRecord::new(r.i, r.alpha, [r.n1p, r.n1q, r.n2p, r.n2q]))
}

pub fn write_count_log<W: Write>(
    mut out: W,
    manifest: &RunManifest,
    records: &[AcquisitionRecord],
) -> io::Result<()> {
    writeln!(out, "{}", manifest.to_json_line())?;
    for r in records {
        writeln!(out, "{}", format_record(r))?;
    }
    out.flush()
}

/// Reads a count log. Records must be numbered `0, 1, 2, ...` and, when the
/// manifest records an iteration count, there must be exactly that many.
pub fn parse_count_log<R: BufRead>(reader: R) -> Result<CountLog, LogError> {
    let mut lines = reader.lines();
    let first = match lines.next() {
        Some(line) => line?,
        None => return Err(LogError::Corrupt { line: 1, reason: "empty file, expected a manifest".into() }),
    };
    let manifest = parse_manifest(&first).map_err(|e| match e {
        ManifestError::UnsupportedVersion { .. } => LogError::Version(e),
        ManifestError::Malformed(reason) => LogError::Corrupt { line: 1, reason },
    })?;

    let mut records = Vec::new();
    let mut line_no = 1;
    for line in lines {
        let line = line?;
        line_no += 1;
        let record = parse_record_line(&line).map_err(|reason| LogError::Corrupt { line: line_no, reason })?;
        if record.iteration != records.len() {
            return Err(LogError::Corrupt {
                line: line_no,
                reason: format!("expected iteration {}, found {}", records.len(), record.iteration),
            });
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(LogError::Corrupt { line: line_no + 1, reason: "no count records".into() });
    }
    if let Some(expected) = manifest.params.iterations {
        if records.len() != expected {
            return Err(LogError::Corrupt {
                line: line_no + 1,
                reason: format!("manifest announces {expected} iterations, found {}", records.len()),
            });
        }
    }
    Ok(CountLog { manifest, records })
}
