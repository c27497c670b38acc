#![no_main]
use libfuzzer_sys::fuzz_target;
use pce_core::data::format::{format_dataset, format_matrix, parse_data_file, DataFile};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        // anything that parses must survive a write/read cycle unchanged
        match parse_data_file(s) {
            Ok(DataFile::Labeled(ds)) => {
                let again = parse_data_file(&format_dataset(&ds)).unwrap();
                assert_eq!(again, DataFile::Labeled(ds));
            }
            Ok(DataFile::Matrix(m)) => {
                let again = parse_data_file(&format_matrix(&m)).unwrap();
                assert_eq!(again, DataFile::Matrix(m));
            }
            Err(_) => {}
        }
    }
});
