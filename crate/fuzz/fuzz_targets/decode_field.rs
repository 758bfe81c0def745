#![no_main]

use libfuzzer_sys::fuzz_target;

// Input: JSON header, a NUL byte, then the raw column.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let Ok(header) = std::str::from_utf8(&data[..split]) else { return };
    let _ = afk_core::io::decode_field(header, &data[split + 1..]);
});
