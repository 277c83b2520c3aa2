#![no_main]

use libfuzzer_sys::fuzz_target;
use ysqht_core::io::{parse_count_log, write_count_log};

fuzz_target!(|data: &[u8]| {
    // anything that parses must survive a write/parse round trip
    if let Ok(log) = parse_count_log(data) {
        let mut buf = Vec::new();
        write_count_log(&mut buf, &log.manifest, &log.records).unwrap();
        let again = parse_count_log(buf.as_slice()).expect("round trip");
        assert_eq!(again.records, log.records);
    }
});
