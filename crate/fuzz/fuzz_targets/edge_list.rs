#![no_main]

use framelet_core::graph::parse_edge_list_with_loops;
use framelet_core::parse_edge_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_edge_list(text) {
        let again = parse_edge_list(&g.to_edge_list()).expect("emitted edge list reparses");
        assert_eq!(again, g);
    }
    let _ = parse_edge_list_with_loops(text, true);
});
