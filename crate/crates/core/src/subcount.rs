//! Exact subuniverse counting and the relative measure `|Sub| * 2^(8 - n)`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::order::{bit, full_mask, members, Mask};
use crate::pgroupoid::PartialGroupoid;

/// Largest universe the subset-scanning counter accepts.
pub const NAIVE_LIMIT: usize = 24;

const MEMO_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("size {size} exceeds the naive counter's bound {max}")]
    SizeLimitExceeded { size: usize, max: usize },
}

/// Closure condition: whenever both arguments of a defined product lie in `x`,
/// so does the result.
pub fn is_subuniverse(g: &PartialGroupoid, x: Mask) -> bool {
    g.products()
        .all(|p| x & bit(p.left) == 0 || x & bit(p.right) == 0 || x & bit(p.result) != 0)
}

/// Scans all `2^n` subsets.
pub fn count_subuniverses_naive(g: &PartialGroupoid) -> Result<BigUint, CountError> {
    let n = g.len();
    if n > NAIVE_LIMIT {
        return Err(CountError::SizeLimitExceeded { size: n, max: NAIVE_LIMIT });
    }
    let triples: Vec<(Mask, Mask)> = g
        .products()
        .map(|p| (bit(p.left) | bit(p.right), bit(p.result)))
        .collect();
    let count = (0..1u64 << n)
        .filter(|&x| triples.iter().all(|&(args, res)| x & args != args || x & res != 0))
        .count();
    Ok(BigUint::from(count))
}

/// Include/exclude search with closure propagation, after splitting the
/// constraint hypergraph into connected components.
pub fn count_subuniverses(g: &PartialGroupoid) -> BigUint {
    BigUint::from(Counter::new(g).count())
}

/// Same as [`count_subuniverses`] but as a machine integer (`n <= 64` keeps it
/// below `2^64 + 1`).
pub fn count_subuniverses_u128(g: &PartialGroupoid) -> u128 {
    Counter::new(g).count()
}

pub fn sigma(g: &PartialGroupoid) -> DyadicValue {
    DyadicValue::sigma(count_subuniverses(g), g.len())
}

/// The least subuniverse containing `seed`.
pub fn generated_subuniverse(g: &PartialGroupoid, seed: Mask) -> Mask {
    *generation_chain(g, seed).last().unwrap()
}

/// `Z_0 = seed`, `Z_{i+1} = Z_i` plus every defined product of two of its
/// elements, up to and including the first repeated set.
pub fn generation_chain(g: &PartialGroupoid, seed: Mask) -> Vec<Mask> {
    let mut chain = vec![seed];
    loop {
        let z = *chain.last().unwrap();
        let next = g
            .products()
            .filter(|p| z & bit(p.left) != 0 && z & bit(p.right) != 0)
            .fold(z, |acc, p| acc | bit(p.result));
        if next == z {
            return chain;
        }
        chain.push(next);
    }
}

struct Counter {
    n: usize,
    /// For each element `x`: products `x v y = z` as `(y, z)`.
    by_arg: Vec<Vec<(usize, usize)>>,
    /// For each element `z`: products `x v y = z` as `(x, y)`.
    by_result: Vec<Vec<(usize, usize)>>,
    /// Elements sorted by decreasing constraint degree.
    order: Vec<usize>,
    triples: Vec<(usize, usize, usize)>,
}

impl Counter {
    fn new(g: &PartialGroupoid) -> Counter {
        let n = g.len();
        let mut by_arg = vec![Vec::new(); n];
        let mut by_result = vec![Vec::new(); n];
        let mut triples = Vec::new();
        for p in g.products() {
            by_arg[p.left].push((p.right, p.result));
            if p.left != p.right {
                by_arg[p.right].push((p.left, p.result));
            }
            by_result[p.result].push((p.left, p.right));
            triples.push((p.left, p.right, p.result));
        }
        let deg = g.constraint_degrees();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| (std::cmp::Reverse(deg[x]), x));
        Counter { n, by_arg, by_result, order, triples }
    }

    fn count(&self) -> u128 {
        self.components()
            .into_iter()
            .map(|comp| self.count_within(comp))
            .product()
    }

    fn components(&self) -> Vec<Mask> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for &(x, y, z) in &self.triples {
            let rx = find(&mut parent, x);
            let ry = find(&mut parent, y);
            parent[ry] = rx;
            let rz = find(&mut parent, z);
            let rx = find(&mut parent, x);
            parent[rz] = rx;
        }
        let mut comps: Vec<Mask> = vec![0; self.n];
        for x in 0..self.n {
            let r = find(&mut parent, x);
            comps[r] |= bit(x);
        }
        comps.into_iter().filter(|&m| m != 0).collect()
    }

    fn count_within(&self, universe: Mask) -> u128 {
        let triples: Vec<(usize, usize, usize)> =
            self.triples.iter().copied().filter(|&(x, _, _)| universe & bit(x) != 0).collect();
        let mut memo = HashMap::new();
        self.search(universe, &triples, 0, 0, &mut memo)
    }

    /// Branches on the open element of highest degree. Two states with the
    /// same open set that agree on every element still touching a live
    /// product have the same number of completions, so they share a memo slot.
    fn search(
        &self,
        universe: Mask,
        triples: &[(usize, usize, usize)],
        inc: Mask,
        exc: Mask,
        memo: &mut HashMap<(Mask, Mask, Mask), u128>,
    ) -> u128 {
        let open = universe & !(inc | exc);
        if open == 0 {
            return 1;
        }
        // a product is live while no argument is excluded and its result is not included
        let touched = triples
            .iter()
            .filter(|&&(x, y, z)| exc & (bit(x) | bit(y)) == 0 && inc & bit(z) == 0)
            .fold(0, |m, &(x, y, z)| m | bit(x) | bit(y) | bit(z));
        if touched & open == 0 {
            return 1u128 << open.count_ones();
        }
        let key = (open, inc & touched, exc & touched);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let x = *self
            .order
            .iter()
            .find(|&&x| open & touched & bit(x) != 0)
            .expect("open element");
        let mut total = 0;
        let (mut i2, mut e2) = (inc, exc);
        if self.propagate(Event::Include(x), &mut i2, &mut e2) {
            total += self.search(universe, triples, i2, e2, memo);
        }
        let (mut i3, mut e3) = (inc, exc);
        if self.propagate(Event::Exclude(x), &mut i3, &mut e3) {
            total += self.search(universe, triples, i3, e3, memo);
        }
        if memo.len() < MEMO_LIMIT {
            memo.insert(key, total);
        }
        total
    }

    fn propagate(&self, first: Event, inc: &mut Mask, exc: &mut Mask) -> bool {
        let mut queue = vec![first];
        while let Some(ev) = queue.pop() {
            match ev {
                Event::Include(x) => {
                    if *exc & bit(x) != 0 {
                        return false;
                    }
                    if *inc & bit(x) != 0 {
                        continue;
                    }
                    *inc |= bit(x);
                    for &(y, z) in &self.by_arg[x] {
                        if *inc & bit(y) != 0 {
                            queue.push(Event::Include(z));
                        } else if *exc & bit(z) != 0 {
                            queue.push(Event::Exclude(y));
                        }
                    }
                }
                Event::Exclude(z) => {
                    if *inc & bit(z) != 0 {
                        return false;
                    }
                    if *exc & bit(z) != 0 {
                        continue;
                    }
                    *exc |= bit(z);
                    for &(x, y) in &self.by_result[z] {
                        match (*inc & bit(x) != 0, *inc & bit(y) != 0) {
                            (true, true) => return false,
                            (true, false) => queue.push(Event::Exclude(y)),
                            (false, true) => queue.push(Event::Exclude(x)),
                            (false, false) => {}
                        }
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy)]
enum Event {
    Include(usize),
    Exclude(usize),
}

/// The exact value `count * 2^shift`.
#[derive(Clone, Debug)]
pub struct DyadicValue {
    count: BigUint,
    shift: i64,
}

impl DyadicValue {
    pub fn new(count: BigUint, shift: i64) -> DyadicValue {
        DyadicValue { count, shift }
    }

    /// `count * 2^(8 - n)`.
    pub fn sigma(count: BigUint, n: usize) -> DyadicValue {
        DyadicValue { count, shift: 8 - n as i64 }
    }

    pub fn from_integer(k: u64) -> DyadicValue {
        DyadicValue { count: BigUint::from(k), shift: 0 }
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Exact comparison against an integer: `count * 2^max(0, shift)` versus
    /// `k * 2^max(0, -shift)`.
    pub fn cmp_integer(&self, k: u64) -> Ordering {
        let lhs = &self.count << self.shift.max(0) as usize;
        let rhs = BigUint::from(k) << (-self.shift).max(0) as usize;
        lhs.cmp(&rhs)
    }

    pub fn is_integer(&self) -> bool {
        self.shift >= 0 || self.count.trailing_zeros().is_none_or(|tz| tz >= (-self.shift) as u64)
    }

    /// Exact decimal expansion with at least `min_fraction` fractional digits.
    pub fn render(&self, min_fraction: usize) -> String {
        if self.shift >= 0 {
            let int = &self.count << self.shift as usize;
            return if min_fraction == 0 {
                int.to_string()
            } else {
                format!("{int}.{}", "0".repeat(min_fraction))
            };
        }
        let k = (-self.shift) as usize;
        let int = &self.count >> k;
        let rem = &self.count - (&int << k);
        // rem / 2^k == rem * 5^k / 10^k
        let frac = if rem.is_zero() { BigUint::zero() } else { rem * BigUint::from(5u32).pow(k as u32) };
        let mut digits = format!("{frac:0>k$}");
        let width = min_fraction.max(k);
        while digits.len() < width {
            digits.push('0');
        }
        while digits.len() > min_fraction && digits.ends_with('0') {
            digits.pop();
        }
        if digits.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{digits}")
        }
    }
}

impl fmt::Display for DyadicValue {
    /// Sixteen fractional digits, the width used in result reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.render(16))
    }
}

impl Ord for DyadicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let m = self.shift.min(other.shift);
        let a = &self.count << (self.shift - m) as usize;
        let b = &other.count << (other.shift - m) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for DyadicValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DyadicValue {}

impl std::str::FromStr for DyadicValue {
    type Err = ();

    /// Parses a finite decimal whose value is dyadic, e.g. `79.75`.
    fn from_str(s: &str) -> Result<Self, ()> {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let frac = frac.trim_end_matches('0');
        let k = frac.len();
        let digits: BigUint = format!("{int}{frac}").parse().map_err(|_| ())?;
        // value = digits / 10^k = digits / (2^k 5^k)
        let five = BigUint::from(5u32).pow(k as u32);
        if !(&digits % &five).is_zero() {
            return Err(());
        }
        Ok(DyadicValue { count: digits / five, shift: -(k as i64) })
    }
}

/// `2^n` as a count, for convenience in tests and reports.
pub fn power_of_two(n: usize) -> BigUint {
    BigUint::one() << n
}

/// Every subuniverse, as masks in increasing order (`n <= NAIVE_LIMIT`).
pub fn subuniverses(g: &PartialGroupoid) -> Result<Vec<Mask>, CountError> {
    let n = g.len();
    if n > NAIVE_LIMIT {
        return Err(CountError::SizeLimitExceeded { size: n, max: NAIVE_LIMIT });
    }
    Ok((0..=full_mask(n)).filter(|&x| is_subuniverse(g, x)).collect())
}

/// Members of `mask` rendered with `g`'s labels, e.g. `{a,b,i}`.
pub fn show_set(g: &PartialGroupoid, mask: Mask) -> String {
    let parts: Vec<String> = members(mask).map(|x| g.label(x)).collect();
    format!("{{{}}}", parts.join(","))
}
