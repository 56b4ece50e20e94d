#![no_main]

use libfuzzer_sys::fuzz_target;
use reinforced_perc::environment::{RadiusDistribution, RadiusLaw};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(law) = text.parse::<RadiusLaw>() {
        let shown = law.to_string();
        let again: RadiusLaw = shown.parse().expect("displayed law reparses");
        assert_eq!(shown, again.to_string());
        if let Ok(dist) = RadiusDistribution::new(law) {
            let x = dist.sample(0.5);
            assert!(x >= dist.min_support());
        }
    }
});
