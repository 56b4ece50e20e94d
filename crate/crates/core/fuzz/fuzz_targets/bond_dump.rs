#![no_main]

use libfuzzer_sys::fuzz_target;
use reinforced_perc::engine::{decode_bond_dump, encode_bond_dump};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = decode_bond_dump(text) {
        let encoded = encode_bond_dump(&cfg);
        let again = decode_bond_dump(&encoded).expect("encoded dump decodes");
        assert_eq!(cfg, again);
    }
});
