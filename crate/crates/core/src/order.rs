//! Finite posets stored as bit-packed up-set rows, together with the join
//! tables of those posets that happen to be join-semilattices.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Hard cap on the number of elements of any structure in this crate.
pub const MAX_ELEMENTS: usize = 64;

/// Largest poset accepted by [`Poset::canonical_form`].
pub const MAX_CANONICAL: usize = 12;

/// A set of element indices, one bit per element.
pub type Mask = u64;

#[inline]
pub fn bit(x: usize) -> Mask {
    1u64 << x
}

#[inline]
pub fn full_mask(n: usize) -> Mask {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the indices set in `mask`, lowest first.
pub fn members(mut mask: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let x = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(x)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is not reflexive at element {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric: {0} <= {1} <= {0}")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive: {0} <= {1} <= {2} but not {0} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("elements {0} and {1} have no least upper bound")]
    NotASemilattice(usize, usize),
    #[error("not a lattice")]
    NotALattice,
    #[error("size {size} exceeds the supported bound {max}")]
    SizeLimitExceeded { size: usize, max: usize },
    #[error("a poset needs at least one element")]
    Empty,
    #[error("relation matrix is not square")]
    NotSquare,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(char),
    #[error("unknown label {0:?}")]
    UnknownLabel(char),
    #[error("{labels} labels given for {size} elements")]
    LabelCount { labels: usize, size: usize },
    #[error("malformed edge token {0:?}")]
    MalformedEdge(String),
    #[error("malformed certificate")]
    MalformedCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct PosetFileError {
    pub line: usize,
    pub reason: String,
}

/// A finite partial order on the indices `0..n`.
///
/// Row `up[x]` holds every `y` with `x <= y`; `down` is its transpose.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poset {
    up: Vec<Mask>,
    down: Vec<Mask>,
    labels: Option<Vec<char>>,
}

impl Poset {
    /// Validates a dense boolean relation, `rel[x][y]` meaning `x <= y`.
    pub fn validate(rel: &[Vec<bool>]) -> Result<Poset, OrderError> {
        let n = rel.len();
        if rel.iter().any(|row| row.len() != n) {
            return Err(OrderError::NotSquare);
        }
        let up = rel
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .fold(0, |m, (y, _)| m | bit(y))
            })
            .collect();
        Poset::from_up_sets(up)
    }

    /// Validates up-set rows directly.
    pub fn from_up_sets(up: Vec<Mask>) -> Result<Poset, OrderError> {
        let n = up.len();
        if n == 0 {
            return Err(OrderError::Empty);
        }
        if n > MAX_ELEMENTS {
            return Err(OrderError::SizeLimitExceeded { size: n, max: MAX_ELEMENTS });
        }
        let all = full_mask(n);
        for (x, &row) in up.iter().enumerate() {
            if row & !all != 0 {
                return Err(OrderError::NotSquare);
            }
            if row & bit(x) == 0 {
                return Err(OrderError::NotReflexive(x));
            }
        }
        for x in 0..n {
            for y in members(up[x] & !bit(x)) {
                if up[y] & bit(x) != 0 {
                    return Err(OrderError::NotAntisymmetric(x.min(y), x.max(y)));
                }
            }
        }
        for x in 0..n {
            for y in members(up[x]) {
                let missing = up[y] & !up[x];
                if missing != 0 {
                    return Err(OrderError::NotTransitive(x, y, missing.trailing_zeros() as usize));
                }
            }
        }
        Ok(Self::from_valid_up(up))
    }

    pub(crate) fn from_valid_up(up: Vec<Mask>) -> Poset {
        let n = up.len();
        let mut down = vec![0; n];
        for (x, &row) in up.iter().enumerate() {
            for y in members(row) {
                down[y] |= bit(x);
            }
        }
        Poset { up, down, labels: None }
    }

    /// Builds the reflexive-transitive closure of `x < y` pairs.
    pub fn from_covers(n: usize, edges: &[(usize, usize)]) -> Result<Poset, OrderError> {
        if n == 0 {
            return Err(OrderError::Empty);
        }
        if n > MAX_ELEMENTS {
            return Err(OrderError::SizeLimitExceeded { size: n, max: MAX_ELEMENTS });
        }
        let mut up: Vec<Mask> = (0..n).map(bit).collect();
        for &(x, y) in edges {
            if x >= n || y >= n {
                return Err(OrderError::NotSquare);
            }
            up[x] |= bit(y);
        }
        // Warshall on bit rows.
        for k in 0..n {
            for x in 0..n {
                if up[x] & bit(k) != 0 {
                    up[x] |= up[k];
                }
            }
        }
        Poset::from_up_sets(up)
    }

    /// Builds a labelled poset from an element string such as `"oiabcdefg"` and
    /// whitespace-separated two-character edges such as `"ai bi ca"`, where
    /// `xy` means `x < y`.
    pub fn from_labeled_edges(elements: &str, edges: &str) -> Result<Poset, OrderError> {
        let labels: Vec<char> = elements.chars().collect();
        let index = |c: char| labels.iter().position(|&l| l == c).ok_or(OrderError::UnknownLabel(c));
        let mut pairs = Vec::new();
        for token in edges.split_whitespace() {
            let cs: Vec<char> = token.trim_end_matches(',').chars().collect();
            if cs.len() != 2 {
                return Err(OrderError::MalformedEdge(token.to_string()));
            }
            pairs.push((index(cs[0])?, index(cs[1])?));
        }
        Poset::from_covers(labels.len(), &pairs)?.with_labels(labels)
    }

    /// Reads the two-line poset file format:
    ///
    /// ```text
    /// elements: oabi
    /// edges: oa ob ai bi
    /// ```
    ///
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Poset, PosetFileError> {
        let mut elements: Option<(usize, String)> = None;
        let mut edges: Option<(usize, String)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| PosetFileError { line: i + 1, reason: reason.to_string() };
            let (key, value) = line.split_once(':').ok_or_else(|| err("expected `key: value`"))?;
            let slot = match key.trim() {
                "elements" => &mut elements,
                "edges" => &mut edges,
                _ => return Err(err("unknown key")),
            };
            if slot.is_some() {
                return Err(err("key given twice"));
            }
            *slot = Some((i + 1, value.trim().to_string()));
        }
        let (line, elements) = elements.ok_or(PosetFileError { line: 0, reason: "no elements line".to_string() })?;
        let elements: String = elements.split_whitespace().collect();
        if elements.is_empty() || elements.chars().count() > MAX_ELEMENTS {
            return Err(PosetFileError { line, reason: format!("between 1 and {MAX_ELEMENTS} elements required") });
        }
        let (edge_line, edges) = edges.unwrap_or((line, String::new()));
        Poset::from_labeled_edges(&elements, &edges).map_err(|e| PosetFileError { line: edge_line, reason: e.to_string() })
    }

    pub fn chain(n: usize) -> Poset {
        assert!((1..=MAX_ELEMENTS).contains(&n));
        Self::from_valid_up((0..n).map(|x| full_mask(n) & !(bit(x) - 1)).collect())
    }

    pub fn antichain(n: usize) -> Poset {
        assert!((1..=MAX_ELEMENTS).contains(&n));
        Self::from_valid_up((0..n).map(bit).collect())
    }

    pub fn with_labels(mut self, labels: Vec<char>) -> Result<Poset, OrderError> {
        if labels.len() != self.len() {
            return Err(OrderError::LabelCount { labels: labels.len(), size: self.len() });
        }
        for (i, &c) in labels.iter().enumerate() {
            if labels[..i].contains(&c) {
                return Err(OrderError::DuplicateLabel(c));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Poset {
        self.labels = None;
        self
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn all(&self) -> Mask {
        full_mask(self.len())
    }

    pub fn labels(&self) -> Option<&[char]> {
        self.labels.as_deref()
    }

    /// Display name of an element: its label, or its index when unlabelled.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].to_string(),
            None => x.to_string(),
        }
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|&l| l == c)
    }

    /// Like [`index_of`](Self::index_of) but panics on unknown labels; handy in tests.
    pub fn el(&self, c: char) -> usize {
        self.index_of(c).unwrap_or_else(|| panic!("no element labelled {c:?}"))
    }

    /// Mask of the labelled elements in `s`.
    pub fn mask_of(&self, s: &str) -> Mask {
        s.chars().fold(0, |m, c| m | bit(self.el(c)))
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x] & bit(y) != 0
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    #[inline]
    pub fn parallel(&self, x: usize, y: usize) -> bool {
        !self.comparable(x, y)
    }

    /// `{y : x <= y}`
    #[inline]
    pub fn up_set(&self, x: usize) -> Mask {
        self.up[x]
    }

    /// `{y : y <= x}`
    #[inline]
    pub fn down_set(&self, x: usize) -> Mask {
        self.down[x]
    }

    pub fn up_sets(&self) -> &[Mask] {
        &self.up
    }

    pub fn minimal_elements(&self, set: Mask) -> Mask {
        members(set)
            .filter(|&x| self.down[x] & set == bit(x))
            .fold(0, |m, x| m | bit(x))
    }

    pub fn maximal_elements(&self, set: Mask) -> Mask {
        members(set)
            .filter(|&x| self.up[x] & set == bit(x))
            .fold(0, |m, x| m | bit(x))
    }

    /// The least element of `set`, if it has one.
    pub fn least(&self, set: Mask) -> Option<usize> {
        let mins = self.minimal_elements(set);
        (mins.count_ones() == 1 && set != 0).then(|| mins.trailing_zeros() as usize)
    }

    pub fn greatest(&self, set: Mask) -> Option<usize> {
        let maxs = self.maximal_elements(set);
        (maxs.count_ones() == 1 && set != 0).then(|| maxs.trailing_zeros() as usize)
    }

    pub fn upper_covers(&self, x: usize) -> Mask {
        self.minimal_elements(self.up[x] & !bit(x))
    }

    pub fn lower_covers(&self, x: usize) -> Mask {
        self.maximal_elements(self.down[x] & !bit(x))
    }

    /// All covering pairs `(x, y)` with `x` covered by `y`, in index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| members(self.upper_covers(x)).map(move |y| (x, y)))
            .collect()
    }

    pub fn dual(&self) -> Poset {
        Poset { up: self.down.clone(), down: self.up.clone(), labels: self.labels.clone() }
    }

    /// Ordinal sum of a one-element poset and `self`; the new bottom gets index `n`.
    pub fn add_bottom(&self) -> Poset {
        let n = self.len();
        assert!(n < MAX_ELEMENTS, "add_bottom would exceed {MAX_ELEMENTS} elements");
        let mut up = self.up.clone();
        up.push(full_mask(n + 1));
        let mut p = Self::from_valid_up(up);
        if let Some(labels) = &self.labels {
            let fresh = "0_#$%&*+=?!^~@"
                .chars()
                .chain('\u{00c0}'..)
                .find(|c| !labels.contains(c))
                .expect("some unused label");
            let mut labels = labels.clone();
            labels.push(fresh);
            p.labels = Some(labels);
        }
        p
    }

    /// `{y : y >= x for all x in xs}`; every element when `xs` is empty.
    pub fn upper_bounds(&self, xs: Mask) -> Mask {
        members(xs).fold(self.all(), |acc, x| acc & self.up[x])
    }

    pub fn lower_bounds(&self, xs: Mask) -> Mask {
        members(xs).fold(self.all(), |acc, x| acc & self.down[x])
    }

    /// Elements with exactly one upper cover.
    pub fn mi_elements(&self) -> Mask {
        (0..self.len())
            .filter(|&x| self.upper_covers(x).count_ones() == 1)
            .fold(0, |m, x| m | bit(x))
    }

    pub fn bottom(&self) -> Option<usize> {
        self.least(self.all())
    }

    pub fn top(&self) -> Option<usize> {
        self.greatest(self.all())
    }

    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.least(self.up[x] & self.up[y])
    }

    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.greatest(self.down[x] & self.down[y])
    }

    /// The total join operation, or the first pair (in index order) without a join.
    pub fn join_table(&self) -> Result<JoinTable, OrderError> {
        let n = self.len();
        let mut table = vec![0u8; n * n];
        for x in 0..n {
            table[x * n + x] = x as u8;
            for y in x + 1..n {
                let j = self.join(x, y).ok_or(OrderError::NotASemilattice(x, y))?;
                table[x * n + y] = j as u8;
                table[y * n + x] = j as u8;
            }
        }
        Ok(JoinTable { n, table })
    }

    pub fn is_join_semilattice(&self) -> bool {
        (0..self.len()).all(|x| (x + 1..self.len()).all(|y| self.join(x, y).is_some()))
    }

    pub fn is_lattice(&self) -> bool {
        self.is_join_semilattice() && self.dual().is_join_semilattice()
    }

    /// The subposet induced on `subset`, re-indexed in increasing order of the
    /// original indices, together with that index map.
    pub fn induced(&self, subset: Mask) -> (Poset, Vec<usize>) {
        let elements: Vec<usize> = members(subset & self.all()).collect();
        assert!(!elements.is_empty(), "induced subposet of an empty set");
        let up = elements
            .iter()
            .map(|&x| {
                elements
                    .iter()
                    .enumerate()
                    .filter(|(_, &y)| self.leq(x, y))
                    .fold(0, |m, (i, _)| m | bit(i))
            })
            .collect();
        let mut p = Self::from_valid_up(up);
        if let Some(labels) = &self.labels {
            p.labels = Some(elements.iter().map(|&x| labels[x]).collect());
        }
        (p, elements)
    }

    /// Relabels so that old element `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Poset {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let mut up = vec![0; n];
        for x in 0..n {
            up[perm[x]] = members(self.up[x]).fold(0, |m, y| m | bit(perm[y]));
        }
        let mut p = Self::from_valid_up(up);
        if let Some(labels) = &self.labels {
            let mut l = vec![' '; n];
            for x in 0..n {
                l[perm[x]] = labels[x];
            }
            p.labels = Some(l);
        }
        p
    }

    /// Length of the longest chain ending at each element (minimal elements get 0).
    pub fn heights(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| self.down[x].count_ones());
        let mut h = vec![0; self.len()];
        for &x in &order {
            h[x] = members(self.down[x] & !bit(x)).map(|y| h[y] + 1).max().unwrap_or(0);
        }
        h
    }

    /// Length of the longest chain starting at each element (maximal elements get 0).
    pub fn depths(&self) -> Vec<usize> {
        self.dual().heights()
    }

    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|x| (self.up[x] | self.down[x]) == self.all())
    }

    /// Labelling-independent certificate; equal certificates mean isomorphic posets.
    pub fn canonical_form(&self) -> Result<CanonicalForm, OrderError> {
        canonical::canonical_form(self)
    }

    /// An isomorphism `self -> other` as an index map, if one exists.
    pub fn isomorphism(&self, other: &Poset) -> Result<Option<Vec<usize>>, OrderError> {
        if self.len() != other.len() {
            return Ok(None);
        }
        let a = self.canonical_form()?;
        let b = other.canonical_form()?;
        if a.certificate != b.certificate {
            return Ok(None);
        }
        let mut map = vec![0; self.len()];
        for (pos, &x) in a.labeling.iter().enumerate() {
            map[x] = b.labeling[pos];
        }
        Ok(Some(map))
    }

    pub fn is_isomorphic(&self, other: &Poset) -> Result<bool, OrderError> {
        Ok(self.isomorphism(other)?.is_some())
    }

    /// Rebuilds the canonical representative encoded in a certificate.
    pub fn from_certificate(cert: &str) -> Result<Poset, OrderError> {
        canonical::decode(cert)
    }
}

impl fmt::Display for Poset {
    /// Cover pairs in the two-character edge notation, e.g. `ai bi ca`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(x, y)| match &self.labels {
                Some(_) => format!("{}{}", self.label(x), self.label(y)),
                None => format!("{x}<{y}"),
            })
            .collect();
        write!(f, "{}", edges.join(" "))
    }
}

/// A total, symmetric join operation on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinTable {
    n: usize,
    table: Vec<u8>,
}

impl JoinTable {
    /// Wraps a row-major `n*n` table without checking the semilattice laws;
    /// see [`check_laws`](Self::check_laws).
    pub fn from_rows(n: usize, table: Vec<u8>) -> JoinTable {
        assert_eq!(table.len(), n * n);
        JoinTable { n, table }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    /// Idempotence, commutativity and associativity by direct scan; returns the
    /// first violating triple.
    pub fn check_laws(&self) -> Result<(), (usize, usize, usize)> {
        let n = self.n;
        for x in 0..n {
            if self.join(x, x) != x {
                return Err((x, x, x));
            }
            for y in 0..n {
                if self.join(x, y) != self.join(y, x) {
                    return Err((x, y, y));
                }
                for z in 0..n {
                    if self.join(self.join(x, y), z) != self.join(x, self.join(y, z)) {
                        return Err((x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// The induced order `x <= y iff x v y = y`.
    pub fn to_poset(&self) -> Result<Poset, OrderError> {
        let up = (0..self.n)
            .map(|x| (0..self.n).filter(|&y| self.join(x, y) == y).fold(0, |m, y| m | bit(y)))
            .collect();
        Poset::from_up_sets(up)
    }
}

/// Result of canonical labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub certificate: String,
    /// `labeling[pos]` is the original element placed at canonical position `pos`.
    pub labeling: Vec<usize>,
}

mod canonical {
    use super::*;

    /// Colour refinement followed by a branch-and-bound search for the
    /// lexicographically least relation code among labellings that respect the
    /// refined colour classes.
    pub(super) fn canonical_form(p: &Poset) -> Result<CanonicalForm, OrderError> {
        let n = p.len();
        if n > MAX_CANONICAL {
            return Err(OrderError::SizeLimitExceeded { size: n, max: MAX_CANONICAL });
        }
        let colors = refined_colors(p);
        // Positions are filled class by class in increasing colour order.
        let mut slots: Vec<usize> = colors.clone();
        slots.sort_unstable();

        let twins = twin_classes(p, &colors);
        let mut search = Search {
            p,
            colors: &colors,
            slots: &slots,
            twins: &twins,
            current: Vec::with_capacity(n),
            words: Vec::with_capacity(n),
            best: None,
        };
        search.run(0, false);
        let (best_words, labeling) = search.best.expect("at least one labelling");
        debug_assert_eq!(best_words.len(), n);

        let pos_of: Vec<usize> = {
            let mut v = vec![0; n];
            for (pos, &x) in labeling.iter().enumerate() {
                v[x] = pos;
            }
            v
        };
        let mut cert = format!("{n:02}:");
        for &x in &labeling {
            let row = members(p.up_set(x) & !bit(x)).fold(0u64, |m, y| m | bit(pos_of[y]));
            cert.push_str(&format!("{row:03x}"));
        }
        Ok(CanonicalForm { certificate: cert, labeling })
    }

    pub(super) fn decode(cert: &str) -> Result<Poset, OrderError> {
        let (head, body) = cert.split_once(':').ok_or(OrderError::MalformedCertificate)?;
        let n: usize = head.parse().map_err(|_| OrderError::MalformedCertificate)?;
        if n == 0 || n > MAX_CANONICAL || body.len() != 3 * n || !body.is_ascii() {
            return Err(OrderError::MalformedCertificate);
        }
        let mut up = Vec::with_capacity(n);
        for x in 0..n {
            let row = u64::from_str_radix(&body[3 * x..3 * x + 3], 16)
                .map_err(|_| OrderError::MalformedCertificate)?;
            if row & bit(x) != 0 {
                return Err(OrderError::MalformedCertificate);
            }
            up.push(row | bit(x));
        }
        Poset::from_up_sets(up).map_err(|_| OrderError::MalformedCertificate)
    }

    fn refined_colors(p: &Poset) -> Vec<usize> {
        let n = p.len();
        let heights = p.heights();
        let depths = p.depths();
        let mut colors: Vec<usize> = rank(
            &(0..n)
                .map(|x| {
                    vec![
                        p.down_set(x).count_ones() as usize,
                        p.up_set(x).count_ones() as usize,
                        heights[x],
                        depths[x],
                        p.lower_covers(x).count_ones() as usize,
                        p.upper_covers(x).count_ones() as usize,
                    ]
                })
                .collect::<Vec<_>>(),
        );
        loop {
            let classes = distinct(&colors);
            let keys: Vec<Vec<usize>> = (0..n)
                .map(|x| {
                    let mut below: Vec<usize> = members(p.down_set(x) & !bit(x)).map(|y| colors[y]).collect();
                    let mut above: Vec<usize> = members(p.up_set(x) & !bit(x)).map(|y| colors[y]).collect();
                    let mut cov: Vec<usize> = members(p.upper_covers(x)).map(|y| colors[y]).collect();
                    below.sort_unstable();
                    above.sort_unstable();
                    cov.sort_unstable();
                    let mut key = vec![colors[x], usize::MAX];
                    key.extend(below);
                    key.push(usize::MAX);
                    key.extend(above);
                    key.push(usize::MAX);
                    key.extend(cov);
                    key
                })
                .collect();
            let next = rank(&keys);
            if distinct(&next) == classes {
                return next;
            }
            colors = next;
        }
    }

    fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
        let mut sorted: Vec<K> = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        let idx: BTreeMap<&K, usize> = sorted.iter().enumerate().map(|(i, k)| (k, i)).collect();
        keys.iter().map(|k| idx[k]).collect()
    }

    fn distinct(colors: &[usize]) -> usize {
        let mut c = colors.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// `twins[x]` is the smallest element interchangeable with `x` by an
    /// automorphism that fixes everything else. Same-coloured elements are
    /// incomparable, which makes this relation an equivalence.
    fn twin_classes(p: &Poset, colors: &[usize]) -> Vec<usize> {
        let n = p.len();
        (0..n)
            .map(|x| {
                (0..x)
                    .find(|&y| {
                        colors[x] == colors[y] && {
                            let both = bit(x) | bit(y);
                            p.up_set(x) & !both == p.up_set(y) & !both
                                && p.down_set(x) & !both == p.down_set(y) & !both
                        }
                    })
                    .unwrap_or(x)
            })
            .collect()
    }

    struct Search<'a> {
        p: &'a Poset,
        colors: &'a [usize],
        slots: &'a [usize],
        twins: &'a [usize],
        current: Vec<usize>,
        words: Vec<u32>,
        best: Option<(Vec<u32>, Vec<usize>)>,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, strictly_less: bool) {
            let n = self.p.len();
            if pos == n {
                let better = match &self.best {
                    None => true,
                    Some(_) => strictly_less,
                };
                if better {
                    self.best = Some((self.words.clone(), self.current.clone()));
                }
                return;
            }
            let mut tried: Mask = 0;
            for x in 0..n {
                if self.colors[x] != self.slots[pos] || self.current.contains(&x) {
                    continue;
                }
                if tried & bit(self.twins[x]) != 0 {
                    continue;
                }
                tried |= bit(self.twins[x]);
                let word = self.word(x);
                let mut less = strictly_less;
                if !less {
                    if let Some((best, _)) = &self.best {
                        match word.cmp(&best[pos]) {
                            Ordering::Greater => continue,
                            Ordering::Less => less = true,
                            Ordering::Equal => {}
                        }
                    }
                }
                self.current.push(x);
                self.words.push(word);
                self.run(pos + 1, less);
                self.current.pop();
                self.words.pop();
            }
        }

        /// Two bits per earlier position: below the new element, above it.
        fn word(&self, x: usize) -> u32 {
            self.current.iter().fold(0u32, |w, &y| {
                (w << 2) | ((self.p.lt(y, x) as u32) << 1) | self.p.lt(x, y) as u32
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F0_ELEMENTS: &str = "oiabcdefg";
    const F0_EDGES: &str = "ai bi ca da eb ec fe fd gc of og";

    fn f0() -> Poset {
        Poset::from_labeled_edges(F0_ELEMENTS, F0_EDGES).unwrap()
    }

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (x, row) in r.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(x, y) in pairs {
            r[x][y] = true;
        }
        r
    }

    #[test]
    fn validate_singleton() {
        let p = Poset::validate(&rel(1, &[])).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn validate_reports_violated_axiom() {
        assert_eq!(Poset::validate(&rel(2, &[(0, 1), (1, 0)])), Err(OrderError::NotAntisymmetric(0, 1)));
        assert_eq!(Poset::validate(&rel(3, &[(0, 1), (1, 2)])), Err(OrderError::NotTransitive(0, 1, 2)));
        let mut r = rel(2, &[]);
        r[1][1] = false;
        assert_eq!(Poset::validate(&r), Err(OrderError::NotReflexive(1)));
        assert_eq!(Poset::validate(&[]), Err(OrderError::Empty));
    }

    #[test]
    fn f0_from_edges_has_its_edges_as_covers() {
        let p = f0();
        assert_eq!(p.len(), 9);
        let mut got: Vec<String> = p.covers().iter().map(|&(x, y)| format!("{}{}", p.label(x), p.label(y))).collect();
        let mut want: Vec<String> = F0_EDGES.split_whitespace().map(String::from).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        // the dense relation of F0 validates too
        let dense: Vec<Vec<bool>> = (0..9).map(|x| (0..9).map(|y| p.leq(x, y)).collect()).collect();
        assert_eq!(Poset::validate(&dense).unwrap().up_sets(), p.up_sets());
    }

    #[test]
    fn chain_and_antichain_covers() {
        assert_eq!(Poset::chain(3).covers(), vec![(0, 1), (1, 2)]);
        assert!(Poset::antichain(4).covers().is_empty());
    }

    #[test]
    fn dual_is_an_involution() {
        let p = f0();
        assert_eq!(p.dual().dual(), p);
        assert!(Poset::chain(5).dual().is_isomorphic(&Poset::chain(5)).unwrap());
    }

    #[test]
    fn add_bottom_basics() {
        let two = Poset::chain(1).add_bottom();
        assert!(two.is_isomorphic(&Poset::chain(2)).unwrap());
        let p = f0();
        let bottomless = p.induced(p.all() & !bit(p.el('o'))).0;
        assert!(!bottomless.is_lattice());
        assert!(bottomless.is_join_semilattice());
        let back = bottomless.add_bottom();
        assert_eq!(back.len(), 9);
        assert_eq!(back.bottom(), Some(8));
        assert!(back.is_isomorphic(&p).unwrap());
    }

    #[test]
    fn upper_bounds_examples() {
        assert_eq!(Poset::chain(3).upper_bounds(bit(0)), 0b111);
        assert_eq!(Poset::chain(3).upper_bounds(0), 0b111);
        assert_eq!(Poset::antichain(3).upper_bounds(0b011), 0);
        let p = f0();
        assert_eq!(p.upper_bounds(p.mask_of("ab")), p.mask_of("i"));
    }

    #[test]
    fn mi_elements_examples() {
        assert_eq!(Poset::chain(4).mi_elements(), 0b0111);
        assert_eq!(Poset::antichain(3).mi_elements(), 0);
        let p = f0();
        let top = p.top().unwrap();
        let coatoms = p.lower_covers(top);
        assert_eq!(p.mi_elements() & coatoms, coatoms);
    }

    #[test]
    fn join_tables() {
        let t = Poset::chain(4).join_table().unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(t.join(x, y), x.max(y));
            }
        }
        let p = f0();
        let t = p.join_table().unwrap();
        assert!(t.check_laws().is_ok());
        for (a, b, c) in [('a', 'b', 'i'), ('b', 'c', 'i'), ('c', 'd', 'a'), ('e', 'g', 'c'), ('f', 'g', 'c')] {
            assert_eq!(t.join(p.el(a), p.el(b)), p.el(c));
        }
        assert_eq!(t.to_poset().unwrap().up_sets(), p.up_sets());

        let crown = Poset::from_labeled_edges("abcdefgh", "ae ah be bf cf cg dg dh").unwrap();
        match crown.join_table() {
            Err(OrderError::NotASemilattice(x, y)) => assert!(crown.join(x, y).is_none()),
            other => panic!("expected NotASemilattice, got {other:?}"),
        }
        let (f, g) = (crown.el('f'), crown.el('g'));
        assert!(crown.join(f, g).is_none());
    }

    #[test]
    fn lattice_recognition() {
        assert!(f0().is_lattice());
        assert!(Poset::chain(1).is_lattice());
        assert!(!Poset::antichain(2).is_lattice());
    }

    #[test]
    fn canonical_form_is_invariant_and_decodes() {
        let p = f0();
        let cf = p.canonical_form().unwrap();
        let q = Poset::from_certificate(&cf.certificate).unwrap();
        assert!(q.is_isomorphic(&p).unwrap());
        assert_eq!(q.canonical_form().unwrap().certificate, cf.certificate);
        let perm = [3, 1, 4, 0, 5, 8, 2, 7, 6];
        assert_eq!(p.permuted(&perm).canonical_form().unwrap().certificate, cf.certificate);
        let iso = p.isomorphism(&p.permuted(&perm)).unwrap().unwrap();
        let img = p.permuted(&perm);
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(p.leq(x, y), img.leq(iso[x], iso[y]));
            }
        }
    }

    #[test]
    fn canonical_form_size_limit() {
        assert_eq!(
            Poset::antichain(13).canonical_form(),
            Err(OrderError::SizeLimitExceeded { size: 13, max: MAX_CANONICAL })
        );
        // wide antichains are handled by twin pruning
        Poset::antichain(12).canonical_form().unwrap();
    }

    #[test]
    fn malformed_certificates_are_rejected() {
        for bad in ["", "3", "03:", "03:00000000g", "03:0020040001", "03:002001000", "00:"] {
            assert!(Poset::from_certificate(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn poset_files() {
        let p = Poset::parse_text("# diamond\n\nelements: o a b i\nedges: oa ob ai bi\n").unwrap();
        assert!(p.is_lattice());
        assert_eq!(p.label(p.top().unwrap()), "i");
        let e = Poset::parse_text("elements: ab\nedges: ab ba\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(Poset::parse_text("edges: ab\n").unwrap_err().line, 0);
        assert_eq!(Poset::parse_text("elements: a\nelements: b\n").unwrap_err().line, 2);
        assert_eq!(Poset::parse_text("colour: red\n").unwrap_err().line, 1);
        assert_eq!(Poset::parse_text("elements: a\n").unwrap().len(), 1);
    }
}
