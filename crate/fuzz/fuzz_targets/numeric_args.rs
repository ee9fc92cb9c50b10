#![no_main]

use bottleneck_cli::inputs::{parse_bounds, parse_complex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_complex(text);
    if let Ok(bounds) = parse_bounds(text) {
        assert!(bounds.iter().all(|[lo, hi]| lo <= hi));
    }
});
