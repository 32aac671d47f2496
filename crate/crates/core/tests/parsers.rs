//! Stable-toolchain companion to the fuzz targets: the same round-trip
//! properties on arbitrary text and on mutated valid inputs.

use proptest::prelude::*;
use semilat::catalog::{CatalogId, STRUCTURES};
use semilat::enumerate::{census, CensusFile};
use semilat::planarity::{poset_verdict, stored_witnesses, DrawingWitness};
use semilat::spec::render_spec;
use semilat::{parse_spec, parse_specs, Poset, StructureSpec};

fn seeds() -> Vec<String> {
    let mut out: Vec<String> = STRUCTURES.split("\n\n").map(str::to_string).collect();
    out.extend(stored_witnesses().iter().map(|w| w.drawing.render()));
    out.push(CensusFile::from_rows(4, &census(4, true).unwrap()).render());
    out.push("elements: abxyt\nedges: ax ay bx by xt yt\n".to_string());
    out.push(parse_spec(&out[0]).unwrap().to_json());
    out
}

/// Deletes, duplicates or replaces a few characters of a valid input.
fn mutated() -> impl Strategy<Value = String> {
    let seeds = seeds();
    (0..seeds.len(), proptest::collection::vec((any::<u16>(), 0u8..3, any::<char>()), 1..4)).prop_map(
        move |(i, edits)| {
            let mut cs: Vec<char> = seeds[i].chars().collect();
            for (at, kind, c) in edits {
                if cs.is_empty() {
                    break;
                }
                let at = at as usize % cs.len();
                match kind {
                    0 => {
                        cs.remove(at);
                    }
                    1 => cs.insert(at, cs[at]),
                    _ => cs[at] = c,
                }
            }
            cs.into_iter().collect()
        },
    )
}

fn inputs() -> impl Strategy<Value = String> {
    prop_oneof![mutated(), "\\PC{0,80}", "[a-z +=@:\\n0-9/-]{0,120}"]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn spec_blocks(text in inputs()) {
        if let Ok(specs) = parse_specs(&text) {
            for spec in specs {
                let again = parse_spec(&render_spec(&spec)).unwrap();
                prop_assert_eq!(again.elements, spec.elements);
            }
        }
    }

    #[test]
    fn spec_json(text in inputs()) {
        if let Ok(spec) = StructureSpec::from_json(&text) {
            prop_assert_eq!(StructureSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
    }

    #[test]
    fn drawings(text in inputs()) {
        if let Ok(w) = DrawingWitness::parse(&text) {
            prop_assert_eq!(DrawingWitness::parse(&w.render()).unwrap(), w);
        }
    }

    #[test]
    fn census_files(text in inputs()) {
        if let Ok(f) = CensusFile::parse(&text) {
            prop_assert_eq!(CensusFile::parse(&f.render()).unwrap(), f);
        }
    }

    #[test]
    fn certificates(text in prop_oneof!["[0-9a-f:]{0,30}", "0[1-9]:[0-9a-f]{0,24}", "[0-9a-f]{2}:[0-9a-f]{0,300}"]) {
        if let Ok(p) = Poset::from_certificate(&text) {
            let c = p.canonical_form().unwrap();
            prop_assert!(Poset::from_certificate(&c.certificate).unwrap().is_isomorphic(&p).unwrap());
        }
    }

    #[test]
    fn poset_files(text in inputs()) {
        if let Ok(p) = Poset::parse_text(&text) {
            if p.len() <= 9 {
                let _ = poset_verdict(&p);
            }
        }
    }

    #[test]
    fn catalog_ids(text in "[A-Za-z0-9_() -]{0,16}") {
        if let Ok(id) = text.parse::<CatalogId>() {
            prop_assert_eq!(id.name().parse::<CatalogId>().unwrap(), id);
        }
    }
}
