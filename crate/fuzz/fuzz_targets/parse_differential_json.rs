#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(alpha) = afk_core::io::parse_differential_json(text) {
        let again = afk_core::io::parse_differential_json(&afk_core::io::differential_to_json(&alpha));
        assert_eq!(again.expect("round trip"), alpha);
    }
});
