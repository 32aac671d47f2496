//! Planarity of lattice and semilattice diagrams.
//!
//! Lattices are decided twice, once through forbidden subposets and once
//! through the cover graph with a bottom-top edge added, and the answers must
//! agree. Semilattices go through a cascade of certificates that ends in an
//! exhaustive search for an st-augmentation; only diagrams too large for the
//! graph search come out `Unknown`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::catalog::{poset as catalog_poset, Catalog, CatalogId};
use crate::embed::{find_embedding, Embedding};
use crate::order::{bit, members, Mask, Poset};
use crate::pgroupoid::PartialGroupoid;
use crate::subcount::{count_subuniverses, DyadicValue};

/// Largest graph the Kuratowski search accepts.
pub const MAX_GRAPH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarityError {
    #[error("size {size} exceeds the planarity bound {max}")]
    SizeLimitExceeded { size: usize, max: usize },
    #[error("not a lattice")]
    NotALattice,
    #[error("not a join-semilattice")]
    NotASemilattice,
    #[error("no coordinate for element {0}")]
    MissingCoordinate(String),
    #[error("line {line}: {reason}")]
    MalformedWitness { line: usize, reason: String },
    #[error("forbidden-subposet and cover-graph criteria disagree: {0}")]
    OracleDisagreement(String),
}

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Mask>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        assert!(n <= 64);
        Graph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges: Vec<_> = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Graph::from_edges(a + b, &edges)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loops are not allowed");
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> Mask {
        self.adj[v]
    }

    /// Undirected cover graph of a poset.
    pub fn cover_graph(p: &Poset) -> Graph {
        Graph::from_edges(p.len(), &p.covers())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// A subdivision of `K5` or `K3,3`: branch vertices plus one path per edge of
/// the pattern, listed in the order of [`KuratowskiWitness::required_pairs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    /// Five vertices for `K5`; for `K3,3` the first three form one side.
    pub branch: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
}

impl KuratowskiWitness {
    pub fn required_pairs(&self) -> Vec<(usize, usize)> {
        pairs_for(self.kind, &self.branch)
    }

    /// Paths run between the required branch pairs along graph edges, and no
    /// vertex is used twice except as a branch endpoint.
    pub fn verify(&self, g: &Graph) -> bool {
        let need = match self.kind {
            KuratowskiKind::K5 => 5,
            KuratowskiKind::K33 => 6,
        };
        if self.branch.len() != need || self.branch.iter().any(|&v| v >= g.len()) {
            return false;
        }
        let branch: Mask = self.branch.iter().fold(0, |m, &v| m | bit(v));
        if branch.count_ones() as usize != need {
            return false;
        }
        let pairs = self.required_pairs();
        if pairs.len() != self.paths.len() {
            return false;
        }
        let mut used: Mask = branch;
        for (path, &(u, v)) in self.paths.iter().zip(&pairs) {
            if path.len() < 2 || path[0] != u || path[path.len() - 1] != v {
                return false;
            }
            if path.iter().any(|&x| x >= g.len()) || path.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                return false;
            }
            for &x in &path[1..path.len() - 1] {
                if used & bit(x) != 0 {
                    return false;
                }
                used |= bit(x);
            }
        }
        true
    }
}

fn pairs_for(kind: KuratowskiKind, branch: &[usize]) -> Vec<(usize, usize)> {
    match kind {
        KuratowskiKind::K5 => (0..5).flat_map(|i| (i + 1..5).map(move |j| (branch[i], branch[j]))).collect(),
        KuratowskiKind::K33 => (0..3).flat_map(|i| (3..6).map(move |j| (branch[i], branch[j]))).collect(),
    }
}

/// `Ok(None)` for planar graphs, otherwise a Kuratowski subdivision.
pub fn undirected_planar(g: &Graph) -> Result<Option<KuratowskiWitness>, PlanarityError> {
    let n = g.len();
    if n > MAX_GRAPH {
        return Err(PlanarityError::SizeLimitExceeded { size: n, max: MAX_GRAPH });
    }
    // vertices of degree <= 1 lie on no cycle, so on no subdivision
    let mut alive: Mask = (0..n).fold(0, |m, v| m | bit(v));
    loop {
        let leaf = members(alive).find(|&v| (g.adj[v] & alive).count_ones() <= 1);
        match leaf {
            Some(v) => alive &= !bit(v),
            None => break,
        }
    }
    let degree = |v: usize| (g.adj[v] & alive).count_ones();
    let witness = find_k5(g, alive, &degree).or_else(|| find_k33(g, alive, &degree));
    let (v, e) = (n, g.edge_count());
    if witness.is_none() && v >= 3 {
        assert!(e <= 3 * v - 6, "Euler bound violated by a graph judged planar");
    }
    Ok(witness)
}

fn subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            go(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

fn find_k5(g: &Graph, alive: Mask, degree: &dyn Fn(usize) -> u32) -> Option<KuratowskiWitness> {
    let pool: Vec<usize> = members(alive).filter(|&v| degree(v) >= 4).collect();
    subsets(&pool, 5).into_iter().find_map(|branch| {
        let pairs = pairs_for(KuratowskiKind::K5, &branch);
        route(g, alive, &branch, &pairs).map(|paths| KuratowskiWitness { kind: KuratowskiKind::K5, branch, paths })
    })
}

fn find_k33(g: &Graph, alive: Mask, degree: &dyn Fn(usize) -> u32) -> Option<KuratowskiWitness> {
    let pool: Vec<usize> = members(alive).filter(|&v| degree(v) >= 3).collect();
    for six in subsets(&pool, 6) {
        // side containing six[0], to avoid trying each split twice
        for rest in subsets(&six[1..], 2) {
            let side_a = vec![six[0], rest[0], rest[1]];
            let side_b: Vec<usize> = six.iter().copied().filter(|v| !side_a.contains(v)).collect();
            let branch: Vec<usize> = side_a.into_iter().chain(side_b).collect();
            let pairs = pairs_for(KuratowskiKind::K33, &branch);
            if let Some(paths) = route(g, alive, &branch, &pairs) {
                return Some(KuratowskiWitness { kind: KuratowskiKind::K33, branch, paths });
            }
        }
    }
    None
}

/// Vertex-disjoint paths for every pair, internal vertices avoiding the branch
/// set. Failed `(pair index, used vertices)` states are remembered.
fn route(g: &Graph, alive: Mask, branch: &[usize], pairs: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    let branch_mask: Mask = branch.iter().fold(0, |m, &v| m | bit(v));
    let mut failed = HashSet::new();
    let mut paths = Vec::new();
    if route_from(g, alive & !branch_mask, pairs, 0, 0, &mut paths, &mut failed) {
        Some(paths)
    } else {
        None
    }
}

fn route_from(
    g: &Graph,
    free: Mask,
    pairs: &[(usize, usize)],
    k: usize,
    used: Mask,
    paths: &mut Vec<Vec<usize>>,
    failed: &mut HashSet<(usize, Mask)>,
) -> bool {
    if k == pairs.len() {
        return true;
    }
    if failed.contains(&(k, used)) {
        return false;
    }
    let (u, v) = pairs[k];
    let mut found = false;
    let mut path = vec![u];
    each_path(g, free & !used, v, &mut path, &mut |p: &[usize]| {
        let interior: Mask = p[1..p.len() - 1].iter().fold(0, |m, &x| m | bit(x));
        paths.push(p.to_vec());
        if route_from(g, free, pairs, k + 1, used | interior, paths, failed) {
            found = true;
            return true;
        }
        paths.pop();
        false
    });
    if !found {
        failed.insert((k, used));
    }
    found
}

/// Calls `visit` on each simple path from `path[0]` to `target` whose interior
/// lies in `free`, stopping when `visit` returns true.
fn each_path(g: &Graph, free: Mask, target: usize, path: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    let last = *path.last().unwrap();
    if g.has_edge(last, target) {
        path.push(target);
        let stop = visit(path);
        path.pop();
        if stop {
            return true;
        }
    }
    let on_path: Mask = path.iter().fold(0, |m, &x| m | bit(x));
    for next in members(g.adj[last] & free & !on_path) {
        path.push(next);
        let stop = each_path(g, free, target, path, visit);
        path.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Cover graph plus a bottom-top edge; `Ok(None)` when planar.
pub fn platt_planar_lattice(p: &Poset) -> Result<Option<KuratowskiWitness>, PlanarityError> {
    if !p.is_lattice() {
        return Err(PlanarityError::NotALattice);
    }
    if p.len() > MAX_GRAPH {
        return Err(PlanarityError::SizeLimitExceeded { size: p.len(), max: MAX_GRAPH });
    }
    let mut g = Graph::cover_graph(p);
    let (bottom, top) = (p.bottom().unwrap(), p.top().unwrap());
    if bottom != top && !g.has_edge(bottom, top) {
        g.add_edge(bottom, top);
    }
    undirected_planar(&g)
}

/// Any poset: semilattices go through the cascade, everything else straight
/// to the augmentation search.
pub fn poset_verdict(p: &Poset) -> Result<PlanarityVerdict, PlanarityError> {
    if p.is_join_semilattice() {
        return semilattice_verdict(p);
    }
    Ok(match upward_planar(p)? {
        Some(a) => PlanarityVerdict::new(Verdict::Planar, Reason::Augmented(a)),
        None => PlanarityVerdict::new(Verdict::NonPlanar, Reason::NoAugmentation),
    })
}

/// Extra arcs turning a cover digraph into one with a single source and a
/// single sink that stays planar once the arc `source -> sink` is added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StAugmentation {
    pub source: usize,
    pub sink: usize,
    pub added: Vec<(usize, usize)>,
}

impl StAugmentation {
    /// Re-checks acyclicity, the single source and sink, and planarity.
    pub fn verify(&self, p: &Poset) -> Result<bool, PlanarityError> {
        let n = p.len();
        if self.source >= n || self.sink >= n || self.added.iter().any(|&(u, v)| u >= n || v >= n || u == v) {
            return Ok(false);
        }
        let mut arcs = p.covers();
        arcs.extend(self.added.iter().copied());
        let mut has_in: Mask = 0;
        let mut has_out: Mask = 0;
        for &(u, v) in &arcs {
            has_out |= bit(u);
            has_in |= bit(v);
        }
        let all = p.all();
        if n > 1 && (all & !has_in != bit(self.source) || all & !has_out != bit(self.sink)) {
            return Ok(false);
        }
        let mut reach: Vec<Mask> = vec![0; n];
        for _ in 0..n {
            for &(u, v) in &arcs {
                reach[u] |= bit(v) | reach[v];
            }
        }
        if (0..n).any(|x| reach[x] & bit(x) != 0) {
            return Ok(false);
        }
        Ok(undirected_planar(&st_graph(p, &self.added, self.source, self.sink))?.is_none())
    }
}

fn st_graph(p: &Poset, added: &[(usize, usize)], source: usize, sink: usize) -> Graph {
    let mut g = Graph::cover_graph(p);
    for &(u, v) in added {
        g.add_edge(u, v);
    }
    if source != sink {
        g.add_edge(source, sink);
    }
    g
}

/// Decides whether `p` has a planar diagram. A digraph is upward planar iff it
/// spans a planar st-digraph; for a cover digraph it is enough to give every
/// minimal element but one an incoming arc and every maximal element but one
/// an outgoing arc, so the search below is exhaustive.
pub fn upward_planar(p: &Poset) -> Result<Option<StAugmentation>, PlanarityError> {
    let n = p.len();
    if n > MAX_GRAPH {
        return Err(PlanarityError::SizeLimitExceeded { size: n, max: MAX_GRAPH });
    }
    if n == 1 {
        return Ok(Some(StAugmentation { source: 0, sink: 0, added: Vec::new() }));
    }
    let all = p.all();
    let (mins, maxs) = (p.minimal_elements(all), p.maximal_elements(all));
    let mut reach: Vec<Mask> = (0..n).map(|x| p.up_set(x) & !bit(x)).collect();
    for s in members(mins) {
        for t in members(maxs & !bit(s)) {
            // (element, needs an incoming arc)
            let mut todo: Vec<(usize, bool)> = members(mins & !bit(s)).map(|m| (m, true)).collect();
            todo.extend(members(maxs & !bit(t)).map(|m| (m, false)));
            let mut added = Vec::with_capacity(todo.len());
            if augment(p, s, t, &todo, &mut reach, &mut added)? {
                return Ok(Some(StAugmentation { source: s, sink: t, added }));
            }
        }
    }
    Ok(None)
}

fn augment(
    p: &Poset,
    s: usize,
    t: usize,
    todo: &[(usize, bool)],
    reach: &mut Vec<Mask>,
    added: &mut Vec<(usize, usize)>,
) -> Result<bool, PlanarityError> {
    let Some(&(m, incoming)) = todo.get(added.len()) else {
        return Ok(undirected_planar(&st_graph(p, added, s, t))?.is_none());
    };
    for other in 0..p.len() {
        let (u, v) = if incoming { (other, m) } else { (m, other) };
        // no loops, and the new arc must not close a cycle
        if u == v || reach[v] & bit(u) != 0 {
            continue;
        }
        // the source gets no incoming arc and the sink no outgoing one
        if v == s || u == t {
            continue;
        }
        let saved = reach.clone();
        let gained = bit(v) | reach[v];
        for (x, r) in reach.iter_mut().enumerate() {
            if x == u || *r & bit(u) != 0 {
                *r |= gained;
            }
        }
        added.push((u, v));
        if augment(p, s, t, todo, reach, added)? {
            return Ok(true);
        }
        added.pop();
        *reach = saved;
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Planar,
    NonPlanar,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Planar => "Planar",
            Verdict::NonPlanar => "NonPlanar",
            Verdict::Unknown => "Unknown",
        })
    }
}

impl std::str::FromStr for Verdict {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Planar" => Ok(Verdict::Planar),
            "NonPlanar" => Ok(Verdict::NonPlanar),
            "Unknown" => Ok(Verdict::Unknown),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    /// A forbidden lattice embeds.
    KrForbidden { pattern: CatalogId, embedding: Embedding },
    /// None of the forbidden lattices with at most nine elements embeds.
    NoForbiddenMember,
    /// Cover graph plus bottom-top edge.
    PlattGraph { witness: Option<KuratowskiWitness> },
    SigmaThreshold(DyadicValue),
    /// The lattice obtained by adding a bottom is planar.
    BottomExtensionPlanar,
    /// A stored drawing, transported along an isomorphism, checks out.
    DrawingWitness(CatalogId),
    /// Exhaustive search over st-augmentations.
    Augmented(StAugmentation),
    NoAugmentation,
    NoCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarityVerdict {
    pub verdict: Verdict,
    pub reason: Reason,
}

impl PlanarityVerdict {
    fn new(verdict: Verdict, reason: Reason) -> Self {
        PlanarityVerdict { verdict, reason }
    }

    /// One-line description; `p` supplies labels for embeddings.
    pub fn describe(&self, p: &Poset) -> String {
        let why = match &self.reason {
            Reason::KrForbidden { pattern, embedding } => {
                let pat = catalog_poset(*pattern).expect("forbidden lattices have posets");
                format!("contains {pattern} as subposet ({})", embedding.describe(&pat, p))
            }
            Reason::NoForbiddenMember => "no forbidden lattice with at most nine elements embeds".to_string(),
            Reason::PlattGraph { witness: None } => "cover graph with bottom-top edge is planar".to_string(),
            Reason::PlattGraph { witness: Some(w) } => {
                let kind = match w.kind {
                    KuratowskiKind::K5 => "K5",
                    KuratowskiKind::K33 => "K3,3",
                };
                let names: Vec<String> = w.branch.iter().map(|&v| p.label(v)).collect();
                format!("cover graph with bottom-top edge contains a {kind} subdivision on {}", names.join(","))
            }
            Reason::SigmaThreshold(s) => format!("sigma {s} exceeds 127"),
            Reason::BottomExtensionPlanar => "adding a bottom gives a planar lattice".to_string(),
            Reason::DrawingWitness(id) => format!("stored drawing {id} verifies"),
            Reason::Augmented(a) => format!(
                "cover digraph extends to a planar st-digraph from {} to {} with {} added arcs",
                p.label(a.source),
                p.label(a.sink),
                a.added.len()
            ),
            Reason::NoAugmentation => "no planar st-digraph extends the cover digraph".to_string(),
            Reason::NoCertificate => "no certificate applies".to_string(),
        };
        format!("{}: {why}", self.verdict)
    }
}

/// Forbidden-subposet test against the members with at most nine elements.
pub fn kr_verdict(p: &Poset) -> Result<PlanarityVerdict, PlanarityError> {
    if !p.is_lattice() {
        return Err(PlanarityError::NotALattice);
    }
    for entry in Catalog::standard().kr_members_up_to_nine() {
        let pattern = entry.poset.as_ref().expect("forbidden lattices have posets");
        if let Some(embedding) = find_embedding(pattern, p) {
            return Ok(PlanarityVerdict::new(Verdict::NonPlanar, Reason::KrForbidden { pattern: entry.id, embedding }));
        }
    }
    let verdict = if p.len() <= 9 { Verdict::Planar } else { Verdict::Unknown };
    Ok(PlanarityVerdict::new(verdict, Reason::NoForbiddenMember))
}

/// Both lattice criteria; an error if they are both decisive and disagree.
pub fn lattice_verdict(p: &Poset) -> Result<PlanarityVerdict, PlanarityError> {
    let kr = kr_verdict(p)?;
    let platt = match platt_planar_lattice(p) {
        Ok(w) => Some(w),
        Err(PlanarityError::SizeLimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    match (kr.verdict, platt) {
        (Verdict::Unknown, None) => Ok(kr),
        (Verdict::Unknown, Some(witness)) => {
            let v = if witness.is_none() { Verdict::Planar } else { Verdict::NonPlanar };
            Ok(PlanarityVerdict::new(v, Reason::PlattGraph { witness }))
        }
        (_, None) => Ok(kr),
        (v, Some(witness)) => {
            if (v == Verdict::Planar) != witness.is_none() {
                return Err(PlanarityError::OracleDisagreement(format!("{p}")));
            }
            if v == Verdict::NonPlanar {
                Ok(kr)
            } else {
                Ok(PlanarityVerdict::new(Verdict::Planar, Reason::PlattGraph { witness }))
            }
        }
    }
}

/// The cascade for join-semilattices: large sigma, then the lattice criteria,
/// then planarity of the bottom extension, then stored drawings, and finally
/// the exhaustive augmentation search.
pub fn semilattice_verdict(p: &Poset) -> Result<PlanarityVerdict, PlanarityError> {
    let table = p.join_table().map_err(|_| PlanarityError::NotASemilattice)?;
    let s = DyadicValue::sigma(count_subuniverses(&PartialGroupoid::from_join_semilattice(&table)), p.len());
    if s.cmp_integer(127).is_gt() {
        return Ok(PlanarityVerdict::new(Verdict::Planar, Reason::SigmaThreshold(s)));
    }
    if p.is_lattice() {
        return lattice_verdict(p);
    }
    if p.len() < MAX_GRAPH && platt_planar_lattice(&p.add_bottom())?.is_none() {
        return Ok(PlanarityVerdict::new(Verdict::Planar, Reason::BottomExtensionPlanar));
    }
    for stored in stored_witnesses() {
        if let Some(w) = stored.transport_to(p)? {
            if verify_drawing(p, &w)? {
                return Ok(PlanarityVerdict::new(Verdict::Planar, Reason::DrawingWitness(stored.id)));
            }
        }
    }
    match upward_planar(p) {
        Ok(Some(a)) => Ok(PlanarityVerdict::new(Verdict::Planar, Reason::Augmented(a))),
        Ok(None) => Ok(PlanarityVerdict::new(Verdict::NonPlanar, Reason::NoAugmentation)),
        Err(PlanarityError::SizeLimitExceeded { .. }) => Ok(PlanarityVerdict::new(Verdict::Unknown, Reason::NoCertificate)),
        Err(e) => Err(e),
    }
}

/// Exact coordinates for each labelled element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrawingWitness {
    pub points: Vec<(String, BigRational, BigRational)>,
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

fn render_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl DrawingWitness {
    /// Lines `label x y` with `x`, `y` written `num/den` or as integers;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<DrawingWitness, PlanarityError> {
        let mut points: Vec<(String, BigRational, BigRational)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| PlanarityError::MalformedWitness { line: i + 1, reason: reason.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [label, x, y] = fields[..] else {
                return Err(bad("expected `label x y`"));
            };
            if points.iter().any(|(l, _, _)| l == label) {
                return Err(bad("duplicate label"));
            }
            let x = parse_rational(x).ok_or_else(|| bad("bad x coordinate"))?;
            let y = parse_rational(y).ok_or_else(|| bad("bad y coordinate"))?;
            points.push((label.to_string(), x, y));
        }
        Ok(DrawingWitness { points })
    }

    pub fn render(&self) -> String {
        self.points
            .iter()
            .map(|(l, x, y)| format!("{l} {} {}\n", render_rational(x), render_rational(y)))
            .collect()
    }

    fn point(&self, label: &str) -> Option<(&BigRational, &BigRational)> {
        self.points.iter().find(|(l, _, _)| l == label).map(|(_, x, y)| (x, y))
    }

    /// The drawing with one element deleted (its edges go with it).
    pub fn remove(&self, label: &str) -> DrawingWitness {
        DrawingWitness { points: self.points.iter().filter(|(l, _, _)| l != label).cloned().collect() }
    }
}

type Point = (BigRational, BigRational);

fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    let v = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// `c` on the closed segment `ab`.
fn on_segment(a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, c) == 0
        && a.0.clone().min(b.0.clone()) <= c.0
        && c.0 <= a.0.clone().max(b.0.clone())
        && a.1.clone().min(b.1.clone()) <= c.1
        && c.1 <= a.1.clone().max(b.1.clone())
}

/// Closed segments `ab` and `cd` share a point.
fn segments_meet(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Checks that `w` draws the cover diagram of `p` upward without crossings.
pub fn verify_drawing(p: &Poset, w: &DrawingWitness) -> Result<bool, PlanarityError> {
    let mut pts: Vec<Point> = Vec::with_capacity(p.len());
    for x in 0..p.len() {
        let label = p.label(x);
        let (px, py) = w.point(&label).ok_or(PlanarityError::MissingCoordinate(label))?;
        pts.push((px.clone(), py.clone()));
    }
    for x in 0..p.len() {
        for y in x + 1..p.len() {
            if pts[x] == pts[y] {
                return Ok(false);
            }
        }
    }
    let covers = p.covers();
    if covers.iter().any(|&(lo, hi)| pts[lo].1 >= pts[hi].1) {
        return Ok(false);
    }
    for &(a, b) in &covers {
        for v in 0..p.len() {
            if v != a && v != b && on_segment(&pts[a], &pts[b], &pts[v]) {
                return Ok(false);
            }
        }
    }
    for (i, &(a, b)) in covers.iter().enumerate() {
        for &(c, d) in &covers[i + 1..] {
            let shared = [a, b].iter().filter(|v| [c, d].contains(v)).count();
            let bad = match shared {
                0 => segments_meet(&pts[a], &pts[b], &pts[c], &pts[d]),
                // two edges at a common vertex only overlap when collinear
                _ => {
                    let common = if a == c || a == d { a } else { b };
                    let u = if a == common { b } else { a };
                    let v = if c == common { d } else { c };
                    orient(&pts[common], &pts[u], &pts[v]) == 0
                        && (on_segment(&pts[common], &pts[u], &pts[v]) || on_segment(&pts[common], &pts[v], &pts[u]))
                }
            };
            if bad {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A drawing shipped with the crate for a catalog structure.
#[derive(Clone, Debug)]
pub struct StoredWitness {
    pub id: CatalogId,
    pub drawing: DrawingWitness,
}

const WITNESS_FILES: &[(CatalogId, &str)] = &[
    (CatalogId::A0NoBottom, include_str!("../data/witnesses/A0_nobottom.txt")),
    (CatalogId::CNoBottom, include_str!("../data/witnesses/C_nobottom.txt")),
    (CatalogId::DdualNoBottom, include_str!("../data/witnesses/Ddual_nobottom.txt")),
    (CatalogId::F0NoBottom, include_str!("../data/witnesses/F0_nobottom.txt")),
];

pub fn stored_witnesses() -> Vec<StoredWitness> {
    WITNESS_FILES
        .iter()
        .map(|&(id, text)| StoredWitness { id, drawing: DrawingWitness::parse(text).expect("bundled drawing parses") })
        .collect()
}

impl StoredWitness {
    /// The drawing relabelled for `p`, when `p` is isomorphic to the stored structure.
    pub fn transport_to(&self, p: &Poset) -> Result<Option<DrawingWitness>, PlanarityError> {
        let own = catalog_poset(self.id).expect("stored drawings belong to posets");
        if own.len() != p.len() {
            return Ok(None);
        }
        let iso = p.isomorphism(&own).map_err(|_| PlanarityError::SizeLimitExceeded { size: p.len(), max: crate::order::MAX_CANONICAL })?;
        let Some(iso) = iso else { return Ok(None) };
        let mut points = Vec::with_capacity(p.len());
        for (x, &y) in iso.iter().enumerate() {
            let label = own.label(y);
            let (px, py) = self.drawing.point(&label).ok_or(PlanarityError::MissingCoordinate(label))?;
            points.push((p.label(x), px.clone(), py.clone()));
        }
        Ok(Some(DrawingWitness { points }))
    }
}

/// Deletes the bottom of a drawing of `p`, giving a drawing of `p` minus its bottom.
pub fn remove_bottom(p: &Poset, w: &DrawingWitness) -> Option<(Poset, DrawingWitness)> {
    let bottom = p.bottom()?;
    let (rest, _) = p.induced(p.all() & !bit(bottom));
    Some((rest, w.remove(&p.label(bottom))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict_of(id: CatalogId) -> PlanarityVerdict {
        semilattice_verdict(&catalog_poset(id).unwrap()).unwrap()
    }

    #[test]
    fn small_graphs() {
        assert_eq!(undirected_planar(&Graph::complete(4)).unwrap(), None);
        let k5 = Graph::complete(5);
        let w = undirected_planar(&k5).unwrap().unwrap();
        assert_eq!(w.kind, KuratowskiKind::K5);
        assert!(w.verify(&k5));
        let mut k33 = Graph::complete_bipartite(3, 3);
        let mut bigger = Graph::new(7);
        for u in 0..6 {
            for v in 0..6 {
                if k33.has_edge(u, v) {
                    bigger.add_edge(u, v);
                }
            }
        }
        bigger.add_edge(5, 6);
        let w = undirected_planar(&bigger).unwrap().unwrap();
        assert_eq!(w.kind, KuratowskiKind::K33);
        assert!(w.verify(&bigger));
        k33.add_edge(0, 1);
        assert!(undirected_planar(&k33).unwrap().is_some());
        assert_eq!(
            undirected_planar(&Graph::new(17)),
            Err(PlanarityError::SizeLimitExceeded { size: 17, max: MAX_GRAPH })
        );
    }

    #[test]
    fn petersen_graph_needs_a_subdivision() {
        let outer: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let spokes: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 5)).collect();
        let inner: Vec<(usize, usize)> = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5)).collect();
        let g = Graph::from_edges(10, &[outer, spokes, inner].concat());
        let w = undirected_planar(&g).unwrap().unwrap();
        assert_eq!(w.kind, KuratowskiKind::K33);
        assert!(w.verify(&g));
        assert!(w.paths.iter().any(|p| p.len() > 2));
    }

    #[test]
    fn tampered_witnesses_fail() {
        let k5 = Graph::complete(5);
        let mut w = undirected_planar(&k5).unwrap().unwrap();
        w.paths.swap(0, 1);
        assert!(!w.verify(&k5));
        let mut w = undirected_planar(&k5).unwrap().unwrap();
        w.branch[0] = 9;
        assert!(!w.verify(&k5));
    }

    #[test]
    fn platt_examples() {
        assert_eq!(platt_planar_lattice(&Poset::chain(5)).unwrap(), None);
        assert!(platt_planar_lattice(&catalog_poset(CatalogId::A0).unwrap()).unwrap().is_some());
        assert!(platt_planar_lattice(&catalog_poset(CatalogId::F0).unwrap()).unwrap().is_some());
        assert_eq!(platt_planar_lattice(&Poset::antichain(2)), Err(PlanarityError::NotALattice));
    }

    #[test]
    fn kr_examples() {
        let f0 = catalog_poset(CatalogId::F0).unwrap();
        let v = kr_verdict(&f0).unwrap();
        assert_eq!(v.verdict, Verdict::NonPlanar);
        assert_eq!(v.describe(&f0), "NonPlanar: contains F0 as subposet (identity)");
        assert_eq!(kr_verdict(&Poset::chain(8).add_bottom()).unwrap().verdict, Verdict::Planar);
        // two more bottoms under a planar 9-element lattice
        let big = Poset::chain(9).add_bottom().add_bottom();
        assert_eq!(kr_verdict(&big).unwrap().verdict, Verdict::Unknown);
    }

    #[test]
    fn cascade_examples() {
        let l10 = crate::catalog::sharpness_family(10).unwrap();
        assert_eq!(semilattice_verdict(&l10).unwrap().verdict, Verdict::NonPlanar);
        for id in [CatalogId::A0NoBottom, CatalogId::CNoBottom, CatalogId::DdualNoBottom, CatalogId::F0NoBottom] {
            let v = verdict_of(id);
            assert_eq!(v, PlanarityVerdict::new(Verdict::Planar, Reason::DrawingWitness(id)), "{id}");
        }
        assert_eq!(verdict_of(CatalogId::A0).verdict, Verdict::NonPlanar);
        assert!(matches!(semilattice_verdict(&Poset::chain(4)).unwrap().reason, Reason::SigmaThreshold(_)));
        assert_eq!(semilattice_verdict(&Poset::antichain(2)), Err(PlanarityError::NotASemilattice));
    }

    #[test]
    fn stored_drawings_verify() {
        for s in stored_witnesses() {
            let p = catalog_poset(s.id).unwrap();
            assert!(verify_drawing(&p, &s.drawing).unwrap(), "{}", s.id);
            assert_eq!(DrawingWitness::parse(&s.drawing.render()).unwrap(), s.drawing);
        }
    }

    #[test]
    fn drawing_checks() {
        let chain = Poset::from_labeled_edges("xyz", "xy yz").unwrap();
        let ok = DrawingWitness::parse("x 0 0\ny 0 1\nz 0 2\n").unwrap();
        assert!(verify_drawing(&chain, &ok).unwrap());
        let flat = DrawingWitness::parse("x 0 0\ny 0 0/1\nz 0 2\n").unwrap();
        assert!(!verify_drawing(&chain, &flat).unwrap());
        let missing = DrawingWitness::parse("x 0 0\ny 0 1\n").unwrap();
        assert_eq!(verify_drawing(&chain, &missing), Err(PlanarityError::MissingCoordinate("z".into())));
        // two covers crossing in their interiors
        let v = Poset::from_labeled_edges("abcd", "ad bc").unwrap();
        let crossing = DrawingWitness::parse("a -1 0\nb 1 0\nc -1 1\nd 1 1\n").unwrap();
        assert!(!verify_drawing(&v, &crossing).unwrap());
        let fine = DrawingWitness::parse("a -1 0\nb 1 0\nc 1 1\nd -1 1\n").unwrap();
        assert!(verify_drawing(&v, &fine).unwrap());
        // a vertex sitting on someone else's edge
        let w = Poset::from_labeled_edges("abc", "ab").unwrap();
        let on_edge = DrawingWitness::parse("a 0 0\nb 0 2\nc 0 1\n").unwrap();
        assert!(!verify_drawing(&w, &on_edge).unwrap());
        assert!(DrawingWitness::parse("a 0\n").is_err());
        assert!(DrawingWitness::parse("a 0 1/0\n").is_err());
        assert!(DrawingWitness::parse("a 0 1\na 1 1\n").is_err());
    }

    #[test]
    fn removing_a_bottom_keeps_a_drawing_valid() {
        // the four-element boolean lattice drawn as a diamond, plus a new bottom
        let p = Poset::from_labeled_edges("oabi0", "oa ob ai bi 0o").unwrap();
        let w = DrawingWitness::parse("0 0 -1\no 0 0\na -1 1\nb 1 1\ni 0 2\n").unwrap();
        assert!(verify_drawing(&p, &w).unwrap());
        let (rest, w2) = remove_bottom(&p, &w).unwrap();
        assert_eq!(rest.len(), 4);
        assert!(verify_drawing(&rest, &w2).unwrap());
    }

    #[test]
    fn upward_search_separates_diagram_from_graph_planarity() {
        // F0's cover graph is planar as a graph, its diagram is not
        let f0 = catalog_poset(CatalogId::F0).unwrap();
        assert!(undirected_planar(&Graph::cover_graph(&f0)).unwrap().is_none());
        assert!(upward_planar(&f0).unwrap().is_none());
        // three minimal elements all below three maximal ones: K3,3
        let k33 = Poset::from_labeled_edges("abcxyz", "ax ay az bx by bz cx cy cz").unwrap();
        assert!(upward_planar(&k33).unwrap().is_none());
        let square = Poset::from_labeled_edges("abxy", "ax ay bx by").unwrap();
        let a = upward_planar(&square).unwrap().unwrap();
        assert!(a.verify(&square).unwrap());
        for stored in stored_witnesses() {
            let p = catalog_poset(stored.id).unwrap();
            assert!(upward_planar(&p).unwrap().unwrap().verify(&p).unwrap(), "{}", stored.id);
        }
    }

    #[test]
    fn upward_search_matches_platt_on_lattices() {
        for n in 1..=8 {
            for p in crate::enumerate::all_lattices(n).unwrap() {
                assert_eq!(upward_planar(&p).unwrap().is_some(), platt_planar_lattice(&p).unwrap().is_none(), "{p}");
            }
        }
    }

    #[test]
    fn augmentation_rejects_tampering() {
        let p = catalog_poset(CatalogId::CNoBottom).unwrap();
        let mut a = upward_planar(&p).unwrap().unwrap();
        assert!(a.verify(&p).unwrap());
        a.added.clear();
        assert!(!a.verify(&p).unwrap());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn upward_search_is_self_dual(n in 2usize..=9, seed in proptest::prelude::any::<u64>()) {
            let p = crate::enumerate::random_join_semilattice(n, seed);
            let up = upward_planar(&p).unwrap();
            if let Some(a) = &up {
                proptest::prop_assert!(a.verify(&p).unwrap());
            }
            proptest::prop_assert_eq!(up.is_some(), upward_planar(&p.dual()).unwrap().is_some());
            // a planar bottom extension restricts to a planar diagram
            if platt_planar_lattice(&p.add_bottom()).unwrap().is_none() {
                proptest::prop_assert!(up.is_some());
            }
        }
    }
}
