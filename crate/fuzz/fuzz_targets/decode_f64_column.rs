#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(values) = afk_core::io::decode_f64_column(data) {
        assert_eq!(afk_core::io::encode_f64_column(&values), data);
    }
});
