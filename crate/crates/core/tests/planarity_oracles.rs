//! The certificate cascade checked against the exhaustive augmentation search
//! on every small semilattice, and drawings checked against the search.

use semilat::catalog::{poset, CatalogId};
use semilat::enumerate::{all_join_semilattices, random_join_semilattice};
use semilat::planarity::{semilattice_verdict, stored_witnesses, upward_planar, verify_drawing, Reason, Verdict};

#[test]
fn cascade_agrees_with_exhaustive_search_up_to_eight() {
    let mut nonplanar = Vec::new();
    for n in 1..=8 {
        for p in all_join_semilattices(n).unwrap() {
            let v = semilattice_verdict(&p).unwrap();
            let search = upward_planar(&p).unwrap();
            let expected = if search.is_some() { Verdict::Planar } else { Verdict::NonPlanar };
            assert_eq!(v.verdict, expected, "{p}: {:?}", v.reason);
            if let Some(a) = search {
                assert!(a.verify(&p).unwrap());
            } else {
                nonplanar.push(p);
            }
        }
    }
    assert_eq!(nonplanar.len(), 1);
    assert!(nonplanar[0].is_isomorphic(&poset(CatalogId::A0).unwrap()).unwrap());
}

#[test]
fn random_nine_element_semilattices() {
    for seed in 0..300 {
        let p = random_join_semilattice(9, seed);
        let v = semilattice_verdict(&p).unwrap();
        assert_ne!(v.verdict, Verdict::Unknown);
        if !matches!(v.reason, Reason::Augmented(_) | Reason::NoAugmentation) {
            assert_eq!(v.verdict == Verdict::Planar, upward_planar(&p).unwrap().is_some(), "{p}");
        }
    }
}

#[test]
fn stored_drawings_and_search_agree() {
    for w in stored_witnesses() {
        let p = poset(w.id).unwrap();
        assert!(verify_drawing(&p, &w.drawing).unwrap());
        assert!(upward_planar(&p).unwrap().is_some());
        // the lattice obtained by adding the bottom back is not planar
        assert!(upward_planar(&p.add_bottom()).unwrap().is_none(), "{}", w.id);
    }
}

#[test]
fn forbidden_lattices_have_no_augmentation() {
    for id in semilat::catalog::KR_UP_TO_NINE {
        assert!(upward_planar(&poset(id).unwrap()).unwrap().is_none(), "{id}");
    }
}
