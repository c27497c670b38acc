#![no_main]
use libfuzzer_sys::fuzz_target;
use pce_core::persist::{format_model, parse_model};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(file) = parse_model(s) {
            let text = format_model(&file).unwrap();
            assert_eq!(parse_model(&text).unwrap(), file);
        }
    }
});
