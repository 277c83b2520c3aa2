//! Replays the checked-in fuzz seeds so they stay meaningful as formats evolve.

use std::fs;
use std::path::PathBuf;

use ysqht_core::io::{parse_count_log, parse_list, parse_manifest, parse_range, parse_record_line, ManifestError};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn count_log_seeds_parse() {
    for (name, text) in seeds("count_log") {
        assert!(parse_count_log(text.as_bytes()).is_ok(), "{name}");
    }
}

#[test]
fn manifest_seeds_cover_success_and_version_errors() {
    for (name, text) in seeds("manifest") {
        let result = parse_manifest(&text);
        if name.starts_with("future") {
            assert!(matches!(result, Err(ManifestError::UnsupportedVersion { found: 2 })), "{name}");
        } else {
            assert!(result.is_ok(), "{name}");
        }
    }
}

#[test]
fn record_and_grid_seeds_parse() {
    for (name, text) in seeds("record_line") {
        assert!(parse_record_line(&text).is_ok(), "{name}");
    }
    for (name, text) in seeds("grid_range") {
        assert!(parse_range(&text).is_ok(), "{name}");
    }
    for (name, text) in seeds("value_list") {
        assert!(parse_list(&text).is_ok(), "{name}");
    }
}
