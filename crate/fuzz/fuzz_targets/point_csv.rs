#![no_main]

use bottleneck_cli::inputs::parse_point_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = parse_point_csv(text) {
            assert!(!p.is_empty());
        }
    }
});
