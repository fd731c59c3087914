#![no_main]

use framelet_core::GraphSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = serde_json::from_slice::<GraphSpec>(data) {
        let _ = spec.validate();
    }
});
