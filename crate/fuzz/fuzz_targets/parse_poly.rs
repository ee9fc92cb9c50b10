#![no_main]

use bottleneck_core::algebra::parse_poly;
use bottleneck_core::Complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let vars = ["x".to_string(), "y".to_string(), "z".to_string()];
    if let Ok(p) = parse_poly(text, &vars) {
        let _ = p.evaluate(&[Complex::new(0.5, -0.25); 3]);
        let _ = p.derivative(0);
    }
});
