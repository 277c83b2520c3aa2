#![no_main]

use libfuzzer_sys::fuzz_target;
use ysqht_core::io::parse_manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(manifest) = parse_manifest(text) {
            let _ = manifest.params.acquisition_config();
        }
    }
});
