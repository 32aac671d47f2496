//! Order embeddings (maps that preserve and reflect `<=`).

use crate::order::{bit, Mask, Poset};

/// `map[x]` is the host element assigned to pattern element `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn identity(n: usize) -> Embedding {
        Embedding { map: (0..n).collect() }
    }

    /// Direct check: injective, in range, and `x <= y` iff `map x <= map y`.
    pub fn verify(&self, pattern: &Poset, host: &Poset) -> bool {
        let n = pattern.len();
        if self.map.len() != n || self.map.iter().any(|&h| h >= host.len()) {
            return false;
        }
        let image: Mask = self.map.iter().fold(0, |m, &h| m | bit(h));
        if image.count_ones() as usize != n {
            return false;
        }
        (0..n).all(|x| (0..n).all(|y| pattern.leq(x, y) == host.leq(self.map[x], self.map[y])))
    }

    /// `self: X -> Y` followed by `next: Y -> Z`.
    pub fn compose(&self, next: &Embedding) -> Embedding {
        Embedding { map: self.map.iter().map(|&y| next.map[y]).collect() }
    }

    pub fn image(&self) -> Mask {
        self.map.iter().fold(0, |m, &h| m | bit(h))
    }

    /// `a->p b->q` style rendering with the posets' labels.
    pub fn describe(&self, pattern: &Poset, host: &Poset) -> String {
        if self.map.iter().enumerate().all(|(x, &h)| pattern.label(x) == host.label(h)) {
            return "identity".to_string();
        }
        let parts: Vec<String> =
            self.map.iter().enumerate().map(|(x, &h)| format!("{}->{}", pattern.label(x), host.label(h))).collect();
        parts.join(" ")
    }
}

struct Profile {
    up: Vec<u32>,
    down: Vec<u32>,
    height: Vec<usize>,
    depth: Vec<usize>,
}

impl Profile {
    fn of(p: &Poset) -> Profile {
        Profile {
            up: (0..p.len()).map(|x| p.up_set(x).count_ones()).collect(),
            down: (0..p.len()).map(|x| p.down_set(x).count_ones()).collect(),
            height: p.heights(),
            depth: p.depths(),
        }
    }
}

/// The lexicographically least embedding of `pattern` into `host`, if any.
pub fn find_embedding(pattern: &Poset, host: &Poset) -> Option<Embedding> {
    let (k, n) = (pattern.len(), host.len());
    if k > n {
        return None;
    }
    let (pp, hp) = (Profile::of(pattern), Profile::of(host));
    // candidates[x]: host elements whose up/down sets and chain lengths are
    // large enough to carry x
    let candidates: Vec<Vec<usize>> = (0..k)
        .map(|x| {
            (0..n)
                .filter(|&h| {
                    hp.up[h] >= pp.up[x]
                        && hp.down[h] >= pp.down[x]
                        && hp.height[h] >= pp.height[x]
                        && hp.depth[h] >= pp.depth[x]
                })
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut map = Vec::with_capacity(k);
    if extend(pattern, host, &candidates, &mut map, 0) {
        Some(Embedding { map })
    } else {
        None
    }
}

fn extend(pattern: &Poset, host: &Poset, candidates: &[Vec<usize>], map: &mut Vec<usize>, used: Mask) -> bool {
    let x = map.len();
    if x == pattern.len() {
        return true;
    }
    for &h in &candidates[x] {
        if used & bit(h) != 0 {
            continue;
        }
        let fits = map.iter().enumerate().all(|(y, &g)| {
            pattern.leq(x, y) == host.leq(h, g) && pattern.leq(y, x) == host.leq(g, h)
        });
        if fits {
            map.push(h);
            if extend(pattern, host, candidates, map, used | bit(h)) {
                return true;
            }
            map.pop();
        }
    }
    false
}

/// First pattern, in list order, that embeds into `host`, with its witness.
pub fn contains_any(patterns: &[&Poset], host: &Poset) -> Option<(usize, Embedding)> {
    patterns.iter().enumerate().find_map(|(i, p)| find_embedding(p, host).map(|e| (i, e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{poset, Catalog, CatalogId};
    use proptest::prelude::*;

    fn brute_force(pattern: &Poset, host: &Poset) -> Option<Embedding> {
        fn go(pattern: &Poset, host: &Poset, map: &mut Vec<usize>) -> Option<Embedding> {
            if map.len() == pattern.len() {
                let e = Embedding { map: map.clone() };
                return e.verify(pattern, host).then_some(e);
            }
            for h in 0..host.len() {
                if !map.contains(&h) {
                    map.push(h);
                    if let Some(e) = go(pattern, host, map) {
                        return Some(e);
                    }
                    map.pop();
                }
            }
            None
        }
        go(pattern, host, &mut Vec::new())
    }

    fn arb_poset(max_n: usize) -> impl Strategy<Value = Poset> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                // random relation on the upper triangle, closed transitively
                let mut edges = Vec::new();
                let mut k = 0;
                for x in 0..n {
                    for y in x + 1..n {
                        if bits[k] {
                            edges.push((x, y));
                        }
                        k += 1;
                    }
                }
                Poset::from_covers(n, &edges).unwrap()
            })
        })
    }

    #[test]
    fn identity_embeds() {
        let f0 = poset(CatalogId::F0).unwrap();
        let e = find_embedding(&f0, &f0).unwrap();
        assert_eq!(e, Embedding::identity(9));
        assert_eq!(e.describe(&f0, &f0), "identity");
    }

    #[test]
    fn chains_contain_no_antichain() {
        let host = Poset::chain(8).add_bottom();
        assert!(find_embedding(&Poset::antichain(2), &host).is_none());
        let cat = Catalog::standard();
        let kr: Vec<&Poset> = cat.kr_members_up_to_nine().iter().map(|e| e.poset.as_ref().unwrap()).collect();
        assert!(contains_any(&kr, &host).is_none());
        let (i, e) = contains_any(&kr, kr[9]).unwrap();
        assert_eq!(i, 9);
        assert_eq!(e, Embedding::identity(9));
    }

    #[test]
    fn snake_sits_in_g0() {
        let snake = poset(CatalogId::Snake10).unwrap();
        let g0 = poset(CatalogId::G0).unwrap();
        let e = find_embedding(&snake, &g0).unwrap();
        assert!(e.verify(&snake, &g0));
        // same size as H0 but a different poset
        assert!(find_embedding(&snake, &poset(CatalogId::H0).unwrap()).is_none());
    }

    #[test]
    fn preservation_alone_is_not_enough() {
        // a 2-antichain maps order-preservingly onto a chain, but not as an embedding
        let bad = Embedding { map: vec![0, 1] };
        assert!(!bad.verify(&Poset::antichain(2), &Poset::chain(2)));
    }

    #[test]
    fn a0_placements() {
        let a0 = poset(CatalogId::A0).unwrap();
        let f0 = poset(CatalogId::F0).unwrap();
        assert!(find_embedding(&a0, &poset(CatalogId::F0NoBottom).unwrap()).is_none());
        assert!(find_embedding(&a0, &a0.add_bottom()).is_some());
        assert!(find_embedding(&a0, &f0).is_none());
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(x in arb_poset(4), host in arb_poset(6)) {
            let fast = find_embedding(&x, &host);
            let slow = brute_force(&x, &host);
            prop_assert_eq!(&fast, &slow);
            if let Some(e) = fast {
                prop_assert!(e.verify(&x, &host));
            }
        }

        #[test]
        fn duality_transport(x in arb_poset(5), host in arb_poset(7)) {
            prop_assert_eq!(
                find_embedding(&x, &host).is_some(),
                find_embedding(&x.dual(), &host.dual()).is_some()
            );
        }

        #[test]
        fn composition(x in arb_poset(3), y in arb_poset(5), host in arb_poset(7)) {
            if let (Some(e1), Some(e2)) = (find_embedding(&x, &y), find_embedding(&y, &host)) {
                prop_assert!(e1.compose(&e2).verify(&x, &host));
            }
        }
    }
}
