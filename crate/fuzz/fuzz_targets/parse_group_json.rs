#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(group) = afk_core::io::parse_group_json(text) {
        // renormalization may move a near-identity generator across the
        // identity threshold, so only the label is required to survive
        if let Ok(again) = afk_core::io::parse_group_json(&afk_core::io::group_to_json(&group)) {
            assert_eq!(again.label, group.label);
        }
    }
});
