#![no_main]

use libfuzzer_sys::fuzz_target;
use reinforced_perc::environment::{parse_environment_table, write_environment_table};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(env) = parse_environment_table(text) {
        let written = write_environment_table(&env);
        let again = parse_environment_table(&written).expect("written table reparses");
        assert_eq!(written, write_environment_table(&again));
    }
});
