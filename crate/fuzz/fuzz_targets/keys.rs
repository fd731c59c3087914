#![no_main]

use framelet_core::{BandIndex, DominanceClass};
use framelet_lab::SweepParameter;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(band) = text.parse::<BandIndex>() {
        assert_eq!(band.to_string().parse::<BandIndex>().unwrap(), band);
    }
    if let Ok(class) = text.parse::<DominanceClass>() {
        assert_eq!(class.as_str().parse::<DominanceClass>().unwrap(), class);
    }
    let _ = text.parse::<SweepParameter>();
});
