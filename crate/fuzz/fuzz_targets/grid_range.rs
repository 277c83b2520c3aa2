#![no_main]

use libfuzzer_sys::fuzz_target;
use ysqht_core::io::parse_range;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(range) = parse_range(text) {
            let values = range.values();
            assert_eq!(values.len(), range.points);
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
