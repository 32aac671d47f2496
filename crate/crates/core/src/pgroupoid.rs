//! Partial commutative groupoids: the structures whose subuniverses get counted.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::order::{bit, members, JoinTable, Mask, MAX_ELEMENTS};
use crate::spec::{SpecError, StructureSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("size {0} is outside 1..={MAX_ELEMENTS}")]
    BadSize(usize),
    #[error("element {0} out of range")]
    OutOfRange(usize),
    #[error("pair ({0}, {1}) already maps to {2}, cannot also map to {3}")]
    Conflict(usize, usize, usize, usize),
    #[error("cannot restrict to the empty subset")]
    EmptySubset,
}

/// One defined product `left v right = result`, stored with `left <= right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Product {
    pub left: usize,
    pub right: usize,
    pub result: usize,
}

/// A partial binary operation on `0..n` defined on unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialGroupoid {
    n: usize,
    ops: BTreeMap<(usize, usize), usize>,
    labels: Option<Vec<char>>,
}

fn key(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

impl PartialGroupoid {
    /// The groupoid on `n` elements with empty domain.
    pub fn new(n: usize) -> Result<Self, GroupoidError> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(GroupoidError::BadSize(n));
        }
        Ok(PartialGroupoid { n, ops: BTreeMap::new(), labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<char>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    /// Defines `x v y = z` (and so `y v x = z`). Redefining with the same
    /// value is a no-op.
    pub fn define(&mut self, x: usize, y: usize, z: usize) -> Result<(), GroupoidError> {
        for v in [x, y, z] {
            if v >= self.n {
                return Err(GroupoidError::OutOfRange(v));
            }
        }
        match self.ops.insert(key(x, y), z) {
            Some(old) if old != z => {
                self.ops.insert(key(x, y), old);
                Err(GroupoidError::Conflict(key(x, y).0, key(x, y).1, old, z))
            }
            _ => Ok(()),
        }
    }

    pub fn undefine(&mut self, x: usize, y: usize) -> Option<usize> {
        self.ops.remove(&key(x, y))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> Option<usize> {
        self.ops.get(&key(x, y)).copied()
    }

    /// Number of unordered pairs in the domain.
    pub fn dom_len(&self) -> usize {
        self.ops.len()
    }

    pub fn products(&self) -> impl Iterator<Item = Product> + '_ {
        self.ops.iter().map(|(&(left, right), &result)| Product { left, right, result })
    }

    pub fn labels(&self) -> Option<&[char]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].to_string(),
            None => x.to_string(),
        }
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|&l| l == c)
    }

    /// Mask of labelled elements; panics on unknown labels.
    pub fn mask_of(&self, s: &str) -> Mask {
        s.chars()
            .fold(0, |m, c| m | bit(self.index_of(c).unwrap_or_else(|| panic!("no element {c:?}"))))
    }

    /// The total groupoid of a join table: every pair, diagonal included.
    pub fn from_join_semilattice(t: &JoinTable) -> Self {
        let n = t.len();
        let mut ops = BTreeMap::new();
        for x in 0..n {
            for y in x..n {
                ops.insert((x, y), t.join(x, y));
            }
        }
        PartialGroupoid { n, ops, labels: None }
    }

    /// Domain is exactly the constrained pairs; `+` and `@` name the same operation.
    pub fn from_spec(spec: &StructureSpec) -> Result<Self, SpecError> {
        let mut g = PartialGroupoid::new(spec.elements.len()).map_err(|_| SpecError::Empty)?;
        let index = |c: char| spec.elements.iter().position(|&e| e == c).ok_or(SpecError::UnknownElement { line: 0, element: c });
        for c in &spec.constraints {
            let (x, y, z) = (index(c.left)?, index(c.right)?, index(c.result)?);
            g.define(x, y, z).map_err(|_| SpecError::ConflictingConstraint {
                line: 0,
                left: c.left.min(c.right),
                right: c.left.max(c.right),
            })?;
        }
        g.labels = Some(spec.elements.clone());
        Ok(g)
    }

    /// Keeps the products whose arguments and result all lie in `subset`,
    /// re-indexed in increasing original order. Returns the index map too.
    pub fn restrict(&self, subset: Mask) -> Result<(PartialGroupoid, Vec<usize>), GroupoidError> {
        let elements: Vec<usize> = members(subset).filter(|&x| x < self.n).collect();
        if elements.is_empty() {
            return Err(GroupoidError::EmptySubset);
        }
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in elements.iter().enumerate() {
            pos[x] = i;
        }
        let ops = self
            .ops
            .iter()
            .filter(|(&(x, y), &z)| subset & bit(x) != 0 && subset & bit(y) != 0 && subset & bit(z) != 0)
            .map(|(&(x, y), &z)| (key(pos[x], pos[y]), pos[z]))
            .collect();
        let labels = self.labels.as_ref().map(|l| elements.iter().map(|&x| l[x]).collect());
        Ok((PartialGroupoid { n: elements.len(), ops, labels }, elements))
    }

    /// Adjacency of the constraint hypergraph: each product links its two
    /// arguments and its result.
    pub fn constraint_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for p in self.products() {
            for v in [p.left, p.right, p.result] {
                deg[v] += 1;
            }
        }
        deg
    }
}

/// Whether `small` sits inside `big` along `inject`: every defined product of
/// `small` is defined in `big` on the image pair with the image value.
pub fn is_weak_subgroupoid(small: &PartialGroupoid, big: &PartialGroupoid, inject: &[usize]) -> bool {
    if inject.len() != small.len() || inject.iter().any(|&x| x >= big.len()) {
        return false;
    }
    let image = inject.iter().fold(0u64, |m, &x| m | bit(x));
    if image.count_ones() as usize != inject.len() {
        return false;
    }
    small
        .products()
        .all(|p| big.get(inject[p.left], inject[p.right]) == Some(inject[p.result]))
}
