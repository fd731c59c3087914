#![no_main]

use framelet_lab::io::parse_trace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_trace(text) {
            assert!(rows.iter().enumerate().all(|(i, r)| r.step == i));
        }
    }
});
