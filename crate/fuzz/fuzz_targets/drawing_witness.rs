#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::catalog::{poset, CatalogId};
use semilat::planarity::{verify_drawing, DrawingWitness};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(w) = DrawingWitness::parse(text) else { return };
    assert_eq!(DrawingWitness::parse(&w.render()).expect("round trip"), w);
    let p = poset(CatalogId::CNoBottom).unwrap();
    let _ = verify_drawing(&p, &w);
});
