#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::Poset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = Poset::from_certificate(text) else { return };
    if let Ok(c) = p.canonical_form() {
        let q = Poset::from_certificate(&c.certificate).expect("canonical certificates decode");
        assert!(q.is_isomorphic(&p).unwrap());
    }
});
