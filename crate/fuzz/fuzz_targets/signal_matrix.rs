#![no_main]

use framelet_lab::io::{format_signal, parse_signal};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(h) = parse_signal(text) {
        assert_eq!(parse_signal(&format_signal(&h)).expect("formatted signal reparses"), h);
    }
});
