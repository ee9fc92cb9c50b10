#![no_main]

use bottleneck_core::algebra::parse_system;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything that parses must print to text that parses back to itself.
    if let Ok(sys) = parse_system(text) {
        let printed = sys.to_text();
        let again = parse_system(&printed).expect("printed system parses");
        assert_eq!(again.polys(), sys.polys());
        assert_eq!(again.to_text(), printed);
    }
});
