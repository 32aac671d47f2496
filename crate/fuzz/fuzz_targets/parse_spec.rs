#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::spec::render_spec;
use semilat::{parse_specs, PartialGroupoid};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(specs) = parse_specs(text) else { return };
    for spec in specs {
        // rendering and reparsing gives the same structure
        let again = semilat::parse_spec(&render_spec(&spec)).expect("rendered block parses");
        assert_eq!(again.elements, spec.elements);
        if let Ok(g) = PartialGroupoid::from_spec(&spec) {
            if g.len() <= 16 {
                let _ = semilat::count_subuniverses(&g);
            }
        }
    }
});
