#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::StructureSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = StructureSpec::from_json(text) {
        assert_eq!(StructureSpec::from_json(&spec.to_json()).expect("round trip"), spec);
    }
});
