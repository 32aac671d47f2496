#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::planarity::poset_verdict;
use semilat::Poset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = Poset::parse_text(text) else { return };
    if p.len() <= 9 {
        let _ = poset_verdict(&p);
    }
});
