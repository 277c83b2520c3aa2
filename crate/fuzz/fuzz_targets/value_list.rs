#![no_main]

use libfuzzer_sys::fuzz_target;
use ysqht_core::io::parse_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = parse_list(text) {
            assert!(!values.is_empty());
        }
    }
});
