#![no_main]

use libfuzzer_sys::fuzz_target;
use semilat::enumerate::CensusFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = CensusFile::parse(text) {
        assert_eq!(CensusFile::parse(&file.render()).expect("round trip"), file);
    }
});
