#![no_main]

use libfuzzer_sys::fuzz_target;
use reinforced_perc::graph::{GraphKind, GraphSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = text.parse::<GraphKind>() {
        assert_eq!(kind.to_string().parse::<GraphKind>().ok(), Some(kind));
        if let Ok(spec) = GraphSpec::new(kind) {
            assert_eq!(spec.ball_count(1) as u32, spec.max_degree() + 1);
        }
    }
});
