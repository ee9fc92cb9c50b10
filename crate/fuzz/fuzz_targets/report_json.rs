#![no_main]

use bottleneck_cli::report::BottleneckOutput;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = BottleneckOutput::from_json(text);
    }
});
