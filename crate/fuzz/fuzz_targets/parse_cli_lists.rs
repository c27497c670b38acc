#![no_main]
use libfuzzer_sys::fuzz_target;
use pce_core::eval::bench::parse_sizes;
use pce_core::eval::parse_lambda_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(lambdas) = parse_lambda_list(s) {
            assert!(lambdas.iter().all(|l| l.is_finite() && *l > 0.0));
        }
        let _ = parse_sizes(s, 256);
    }
});
