#![no_main]

use bottleneck_cli::inputs::parse_matrix_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = parse_matrix_csv(text) {
            assert!(m.iter().all(|x| x.is_finite()));
        }
    }
});
