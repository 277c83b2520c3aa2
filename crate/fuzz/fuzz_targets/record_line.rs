#![no_main]

use libfuzzer_sys::fuzz_target;
use ysqht_core::io::{format_record, parse_record_line};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(record) = parse_record_line(text) {
            let again = parse_record_line(&format_record(&record)).expect("round trip");
            assert_eq!(again.alpha.to_bits(), record.alpha.to_bits());
        }
    }
});
