#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = afk_core::io::parse_points_csv(text) {
        let again = afk_core::io::parse_points_csv(&afk_core::io::points_to_csv(&points, &[]));
        assert_eq!(again.expect("round trip"), points);
    }
});
