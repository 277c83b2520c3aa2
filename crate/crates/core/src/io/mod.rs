//! File formats: run manifests, JSON-lines count logs, CSV sweep tables, and
//! the small text grammars used on the command line.

pub mod countlog;
pub mod grid;
pub mod manifest;
pub mod table;

pub use countlog::{format_record, parse_count_log, parse_record_line, write_count_log, CountLog, LogError};
pub use grid::{parse_list, parse_range, GridRange};
pub use manifest::{parse_manifest, ManifestError, RunManifest, RunParams, SweepParams, SCHEMA_VERSION};
pub use table::{sweep_header, write_sweep_csv};
