#![no_main]

use bottleneck_core::topology::{read_cloud_csv, rips_components};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = read_cloud_csv(data) {
        if points.len() <= 256 {
            let _ = rips_components(&points, 0.5);
        }
    }
});
