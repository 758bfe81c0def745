#![no_main]

use libfuzzer_sys::fuzz_target;

// Input: JSON header, a NUL byte, then the column payload.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let Ok(header) = std::str::from_utf8(&data[..split]) else { return };
    if let Ok(columns) = afk_core::io::decode_patch_columns(header, &data[split + 1..]) {
        let n = columns[0].1.len();
        assert!(columns.iter().all(|(_, c)| c.len() == n));
    }
});
