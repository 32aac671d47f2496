#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::catalog::{Catalog, CatalogId};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(id) = text.parse::<CatalogId>() {
        assert_eq!(id.name().parse::<CatalogId>().expect("names parse"), id);
        let _ = Catalog::standard().build(id);
    }
});
