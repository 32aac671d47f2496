//! Named structures: the forbidden lattices, fences, crown and snake, their
//! enriched partial groupoids, plus the one-point extension used to compare a
//! subposet-semilattice with its host.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use thiserror::Error;

use crate::order::{bit, full_mask, members, JoinTable, Mask, Poset};
use crate::pgroupoid::PartialGroupoid;
use crate::spec::{parse_specs, SpecError, StructureSpec};
use crate::subcount::{count_subuniverses, generated_subuniverse, subuniverses, DyadicValue};

/// The transcribed structure blocks that ship with the crate.
pub const STRUCTURES: &str = include_str!("../data/structures.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog id {0:?}")]
    UnknownId(String),
    #[error("block {0:?} does not name a catalog structure")]
    UnknownBlock(String),
    #[error("block for {0} appears twice")]
    DuplicateBlock(CatalogId),
    #[error("family index {0} is below 9")]
    BadFamilyIndex(usize),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatalogId {
    A0,
    B,
    Bdual,
    C,
    Cdual,
    D,
    Ddual,
    E0,
    E0dual,
    E1,
    E1dual,
    F0,
    F1,
    G0,
    H0,
    Crown8,
    Crown8I,
    DownFence9,
    DownFence9I,
    UpFence9,
    UpFence9Fail,
    UpFence9Case1,
    UpFence9Case2,
    Fence8I,
    EnrichedFence8,
    Snake10,
    A0NoBottom,
    CNoBottom,
    DdualNoBottom,
    F0NoBottom,
    Chain(usize),
}

use CatalogId::*;

/// Display name, and the name used on the block's result line when the
/// structure has a transcribed block.
const FIXED: &[(CatalogId, &str, Option<&str>)] = &[
    (A0, "A0", Some("A_0")),
    (B, "B", Some("B")),
    (Bdual, "Bdual", Some("dual-B")),
    (C, "C", Some("C")),
    (Cdual, "Cdual", Some("dual-C")),
    (D, "D", Some("D")),
    (Ddual, "Ddual", Some("dual-D")),
    (E0, "E0", Some("E_0")),
    (E0dual, "E0dual", Some("dual-E_0")),
    (E1, "E1", Some("E_1")),
    (E1dual, "E1dual", Some("dual-E_1")),
    (F0, "F0", Some("F_0")),
    (F1, "F1", Some("F_1")),
    (G0, "G0", Some("G_0")),
    (H0, "H0", Some("H_0")),
    (Crown8, "Crown8", None),
    (Crown8I, "Crown8_i", Some("Eight-crown")),
    (DownFence9, "DownFence9", None),
    (DownFence9I, "DownFence9_i", Some("9-element down-fence (and i)")),
    (UpFence9, "UpFence9", None),
    (UpFence9Fail, "UpFence9_fail", Some("9-element up-fence &i(failure)")),
    (UpFence9Case1, "UpFence9_case1", Some("9-element up-fence & i; Case 1")),
    (UpFence9Case2, "UpFence9_case2", Some("9-element up-fence&i k; Case 2")),
    (Fence8I, "Fence8_i", Some("8fence & i")),
    (EnrichedFence8, "EnrichedFence8", Some("Enriched 8-element fence")),
    (Snake10, "Snake10", Some("10-element snake")),
    (A0NoBottom, "A0_nobottom", None),
    (CNoBottom, "C_nobottom", None),
    (DdualNoBottom, "Ddual_nobottom", None),
    (F0NoBottom, "F0_nobottom", None),
];

/// Extra spellings accepted by [`CatalogId::from_str`], after normalisation.
const ALIASES: &[(&str, CatalogId)] = &[
    ("eightcrown", Crown8I),
    ("8crown", Crown8),
    ("8fence", Fence8I),
    ("8fencei", Fence8I),
    ("9elementdownfence", DownFence9),
    ("9elementupfence", UpFence9),
    ("enriched8elementfence", EnrichedFence8),
    ("10elementsnake", Snake10),
    ("snake", Snake10),
];

impl CatalogId {
    /// Every id except the parametric chains, in declaration order.
    pub fn fixed() -> impl Iterator<Item = CatalogId> {
        FIXED.iter().map(|&(id, _, _)| id)
    }

    pub fn name(self) -> String {
        match self {
            Chain(n) => format!("Chain({n})"),
            id => FIXED.iter().find(|e| e.0 == id).expect("listed").1.to_string(),
        }
    }

    /// The result-line name of the transcribed block for this id, if any.
    pub fn block_name(self) -> Option<&'static str> {
        FIXED.iter().find(|e| e.0 == self).and_then(|e| e.2)
    }

    fn from_block_name(name: &str) -> Option<CatalogId> {
        FIXED.iter().find(|e| e.2 == Some(name.trim())).map(|e| e.0)
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn normalize(s: &str) -> String {
    let flat: String = s
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .flat_map(char::to_lowercase)
        .collect();
    match flat.strip_prefix("dual") {
        Some(rest) if !rest.is_empty() => format!("{rest}dual"),
        _ => flat,
    }
}

impl FromStr for CatalogId {
    type Err = CatalogError;

    /// Case-insensitive; ignores `-`, `_` and spaces; accepts `dual-X` for
    /// `Xdual`, block names such as `E_0`, and `chain(n)` / `chainN`.
    fn from_str(s: &str) -> Result<Self, CatalogError> {
        let key = normalize(s);
        if let Some(rest) = key.strip_prefix("chain") {
            let digits = rest.trim_start_matches('(').trim_end_matches(')');
            return match digits.parse::<usize>() {
                Ok(n) if (1..=64).contains(&n) => Ok(Chain(n)),
                _ => Err(CatalogError::UnknownId(s.to_string())),
            };
        }
        FIXED
            .iter()
            .find(|(_, name, block)| normalize(name) == key || block.is_some_and(|b| normalize(b) == key))
            .map(|e| e.0)
            .or_else(|| ALIASES.iter().find(|a| a.0 == key).map(|a| a.1))
            .ok_or_else(|| CatalogError::UnknownId(s.to_string()))
    }
}

/// Element string and cover edges (`xy` means `x < y`) of each poset-bearing id.
fn edges(id: CatalogId) -> Option<(&'static str, &'static str)> {
    Some(match id {
        A0 => ("oiabcABC", "oa ob oc Ai Bi Ci aB aC bA bC cA cB"),
        B => ("oiabcdefg", "oa ob oc od ae be bf bg cf dg ei fi gi"),
        C => ("oiabcdefg", "ai bi ci da db eb ec fb gd ge og of"),
        D => ("oiabcdefg", "oa ob ac ae ad be cf dg ef eg fi gi"),
        E0 => ("oiabcdefg", "ai bi ci db ea ed fd fc gb oe of og"),
        E1 => ("oiabcdefghj", "ai bi ca da ei fb fc gc gd hd he ja of og oh oj"),
        F0 => ("oiabcdefg", "ai bi ca da eb ec fe fd gc of og"),
        F1 => ("oiabcdefghj", "oa od ab ac ah be bf cf cg dg ei fj gj hj ji"),
        G0 => ("oiabcdefghj", "oa ob ac ad ag bd ce de df eh ej fj gj hi ji"),
        H0 => ("oiabcdefgh", "oa ob oc ad bd be bh cg df dg eg fi gi hi"),
        Crown8 => ("abcdefgh", "ae ah be bf cf cg dg dh"),
        DownFence9 => ("abcdefghj", "af bf bg cg ch dh dj ej"),
        UpFence9 => ("abcdefghj", "ae af bf bg cg ch dh dj"),
        EnrichedFence8 => ("abcdefghji", "ae af bf bg cg ch dh fj gj ei ji hi"),
        Snake10 => ("abcdefghio", "oa ob ac ad bd ce de df eg eh fh gi hi"),
        _ => return None,
    })
}

fn dual_of(id: CatalogId) -> Option<CatalogId> {
    Some(match id {
        Bdual => B,
        Cdual => C,
        Ddual => D,
        E0dual => E0,
        E1dual => E1,
        _ => return None,
    })
}

fn without_bottom(id: CatalogId) -> Option<CatalogId> {
    Some(match id {
        A0NoBottom => A0,
        CNoBottom => C,
        DdualNoBottom => Ddual,
        F0NoBottom => F0,
        _ => return None,
    })
}

/// The order-theoretic object behind an id, when it has one.
pub fn poset(id: CatalogId) -> Option<Poset> {
    if let Chain(n) = id {
        return Some(Poset::chain(n));
    }
    if let Some((elements, list)) = edges(id) {
        return Some(Poset::from_labeled_edges(elements, list).expect("valid built-in edge list"));
    }
    if let Some(base) = dual_of(id) {
        return poset(base).map(|p| p.dual());
    }
    let full = poset(without_bottom(id)?)?;
    let bottom = full.bottom().expect("lattice has a bottom");
    Some(full.induced(full.all() & !bit(bottom)).0)
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: CatalogId,
    pub poset: Option<Poset>,
    /// The transcribed partial groupoid when a block exists, otherwise the
    /// total join operation of a semilattice poset.
    pub groupoid: Option<PartialGroupoid>,
    pub spec: Option<StructureSpec>,
    pub expected_sub: Option<BigUint>,
    pub expected_sigma: Option<DyadicValue>,
    /// Where the expected values come from.
    pub source: String,
}

impl CatalogEntry {
    fn assemble(id: CatalogId, spec: Option<StructureSpec>) -> Result<CatalogEntry, CatalogError> {
        let poset = poset(id);
        let groupoid = match &spec {
            Some(s) => Some(PartialGroupoid::from_spec(s)?),
            None => poset.as_ref().and_then(total_groupoid),
        };
        let (expected_sub, expected_sigma, source) = match (&spec, id) {
            (Some(s), _) => {
                let reported = s.reported.as_ref();
                (
                    reported.map(|r| BigUint::from(r.sub_count)),
                    reported.and_then(|r| r.sigma.as_deref()).and_then(|t| t.parse().ok()),
                    format!("Result for A={}", s.name),
                )
            }
            (None, Chain(n)) => {
                let count = BigUint::from(1u32) << n;
                (Some(count.clone()), Some(DyadicValue::sigma(count, n)), "every subset of a chain".to_string())
            }
            (None, _) => (None, None, String::new()),
        };
        Ok(CatalogEntry { id, poset, groupoid, spec, expected_sub, expected_sigma, source })
    }

    pub fn len(&self) -> usize {
        self.groupoid
            .as_ref()
            .map(PartialGroupoid::len)
            .or_else(|| self.poset.as_ref().map(Poset::len))
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The total groupoid of a semilattice poset, labelled like the poset.
pub fn total_groupoid(p: &Poset) -> Option<PartialGroupoid> {
    let g = PartialGroupoid::from_join_semilattice(&p.join_table().ok()?);
    Some(match p.labels() {
        Some(l) => g.with_labels(l.to_vec()),
        None => g,
    })
}

/// Read-only registry of the fixed ids.
#[derive(Clone, Debug)]
pub struct Catalog {
    entries: BTreeMap<CatalogId, CatalogEntry>,
}

impl Catalog {
    /// Built once from [`STRUCTURES`].
    pub fn standard() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_text(STRUCTURES).expect("bundled structures parse"))
    }

    /// Builds the registry from block text; blocks are matched to ids by the
    /// name on their result line.
    pub fn from_text(text: &str) -> Result<Catalog, CatalogError> {
        let mut blocks: BTreeMap<CatalogId, StructureSpec> = BTreeMap::new();
        for spec in parse_specs(text)? {
            let id = CatalogId::from_block_name(&spec.name).ok_or_else(|| CatalogError::UnknownBlock(spec.name.clone()))?;
            if blocks.insert(id, spec).is_some() {
                return Err(CatalogError::DuplicateBlock(id));
            }
        }
        let mut entries = BTreeMap::new();
        for id in CatalogId::fixed() {
            entries.insert(id, CatalogEntry::assemble(id, blocks.remove(&id))?);
        }
        Ok(Catalog { entries })
    }

    pub fn get(&self, id: CatalogId) -> Option<&CatalogEntry> {
        self.entries.get(&id)
    }

    /// Like [`get`](Self::get) but also builds chains.
    pub fn build(&self, id: CatalogId) -> Result<CatalogEntry, CatalogError> {
        match id {
            Chain(n) if (1..=64).contains(&n) => CatalogEntry::assemble(id, None),
            Chain(n) => Err(CatalogError::UnknownId(format!("Chain({n})"))),
            _ => self.get(id).cloned().ok_or_else(|| CatalogError::UnknownId(id.name())),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    /// Entries carrying a transcribed block, in block order.
    pub fn blocks(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values().filter(|e| e.spec.is_some())
    }

    /// The forbidden lattices with at most nine elements.
    pub fn kr_members_up_to_nine(&self) -> Vec<&CatalogEntry> {
        KR_UP_TO_NINE.iter().map(|&id| &self.entries[&id]).collect()
    }

    /// Pairs `(small, big, inject)` of catalog groupoids where `small` is a weak
    /// partial subgroupoid of `big`: each transcribed groupoid inside the total
    /// operation of its own semilattice, and every label-preserving inclusion
    /// between two different entries.
    pub fn weak_pairs(&self) -> Vec<WeakPair> {
        let mut pairs = Vec::new();
        for e in self.entries.values() {
            if let (Some(g), Some(total)) = (&e.groupoid, e.poset.as_ref().and_then(total_groupoid)) {
                if e.spec.is_some() && g.len() == total.len() {
                    let inject: Vec<usize> = (0..g.len()).collect();
                    if crate::pgroupoid::is_weak_subgroupoid(g, &total, &inject) {
                        pairs.push(WeakPair { small: e.id, big: e.id, total_big: true, inject });
                    }
                }
            }
        }
        for small in self.entries.values() {
            for big in self.entries.values() {
                let (Some(gs), Some(gb)) = (&small.groupoid, &big.groupoid) else { continue };
                if small.id == big.id || gs.len() > gb.len() {
                    continue;
                }
                let (Some(ls), Some(_)) = (gs.labels(), gb.labels()) else { continue };
                let inject: Option<Vec<usize>> = ls.iter().map(|&c| gb.index_of(c)).collect();
                if let Some(inject) = inject {
                    if crate::pgroupoid::is_weak_subgroupoid(gs, gb, &inject) {
                        pairs.push(WeakPair { small: small.id, big: big.id, total_big: false, inject });
                    }
                }
            }
        }
        pairs
    }
}

pub const KR_UP_TO_NINE: [CatalogId; 10] = [A0, B, Bdual, C, Cdual, D, Ddual, E0, E0dual, F0];

/// `small` embeds in `big` along `inject`. With `total_big` the larger side is
/// the total join operation of `big`'s poset rather than its stored groupoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakPair {
    pub small: CatalogId,
    pub big: CatalogId,
    pub total_big: bool,
    pub inject: Vec<usize>,
}

impl WeakPair {
    pub fn groupoids(&self, catalog: &Catalog) -> (PartialGroupoid, PartialGroupoid) {
        let small = catalog.get(self.small).and_then(|e| e.groupoid.clone()).expect("small side");
        let big_entry = catalog.get(self.big).expect("big side");
        let big = if self.total_big {
            big_entry.poset.as_ref().and_then(total_groupoid)
        } else {
            big_entry.groupoid.clone()
        };
        (small, big.expect("big side"))
    }
}

/// Repeatedly adds `x v w = z` whenever `x v y = u`, `y < w` in `order` and
/// `u v w = z` are already defined.
fn close_under_consequences(g: &mut PartialGroupoid, order: &Poset) {
    let labels = g.labels().expect("labelled").to_vec();
    let in_order = |c: usize| order.index_of(labels[c]);
    loop {
        let mut new = Vec::new();
        for p in g.products() {
            for (x, y) in [(p.left, p.right), (p.right, p.left)] {
                let Some(oy) = in_order(y) else { continue };
                for w in 0..g.len() {
                    let Some(ow) = in_order(w) else { continue };
                    if w == x || !order.lt(oy, ow) || g.get(x, w).is_some() {
                        continue;
                    }
                    if let Some(z) = g.get(p.result, w) {
                        new.push((x, w, z));
                    }
                }
            }
        }
        if new.is_empty() {
            return;
        }
        for (x, w, z) in new {
            g.define(x, w, z).expect("consequences agree");
        }
    }
}

fn enrich(base: CatalogId, elements: &str, equations: &[&str]) -> PartialGroupoid {
    let labels: Vec<char> = elements.chars().collect();
    let mut g = PartialGroupoid::new(labels.len()).unwrap().with_labels(labels);
    for eq in equations {
        let cs: Vec<char> = eq.chars().collect();
        let idx = |c: char| g.index_of(c).unwrap();
        let (x, y, z) = (idx(cs[0]), idx(cs[1]), idx(cs[2]));
        g.define(x, y, z).unwrap();
    }
    close_under_consequences(&mut g, &poset(base).unwrap());
    g
}

/// The down-fence with its top joins fixed and `i = g v h` adjoined.
pub fn enrich_down_fence() -> PartialGroupoid {
    enrich(DownFence9, "abcdefghji", &["abf", "bcg", "cdh", "dej", "ghi"])
}

/// The 8-crown with `i = f v g` adjoined.
pub fn enrich_crown() -> PartialGroupoid {
    enrich(Crown8, "abcdefghi", &["abe", "adh", "bcf", "cdg", "fgi"])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpFenceCase {
    /// Only the forced joins; too many subuniverses to conclude anything.
    Fail,
    /// `h v j` equals `i`.
    Case1,
    /// `h v j` is a new element `k`.
    Case2,
}

pub fn enrich_up_fence(case: UpFenceCase) -> PartialGroupoid {
    let base = ["abf", "bcg", "cdh", "fgi"];
    match case {
        UpFenceCase::Fail => enrich(UpFence9, "abcdefghji", &base),
        UpFenceCase::Case1 => enrich(UpFence9, "abcdefghji", &[&base[..], &["hji"]].concat()),
        UpFenceCase::Case2 => enrich(UpFence9, "abcdefghjik", &[&base[..], &["hjk"]].concat()),
    }
}

/// `L_9 = F0`, `L_n = L_{n-1}` with a new bottom.
pub fn sharpness_family(n: usize) -> Result<Poset, CatalogError> {
    if !(9..=64).contains(&n) {
        return Err(CatalogError::BadFamilyIndex(n));
    }
    Ok((9..n).fold(poset(F0).unwrap(), |p, _| p.add_bottom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyLemmaError {
    #[error("the host is not a join-semilattice")]
    HostNotASemilattice,
    #[error("the chosen subset is empty or not a join-semilattice under the induced order")]
    NotASubposetSemilattice,
}

/// One application of the extension: `B = S + {d}` inside `L`.
#[derive(Clone, Debug)]
pub struct KeyLemmaStep {
    /// `S` as a mask of host elements.
    pub s: Mask,
    /// `B` as a mask of host elements.
    pub b: Mask,
    /// The host element added.
    pub d: usize,
    /// The least element of `S` where the two joins disagree.
    pub j: usize,
    /// The pair realising the disagreement at `j`.
    pub pair: (usize, usize),
    /// `B`'s join operation as prescribed by the case rules, indexed by the
    /// increasing host indices of `B`.
    pub rule_table: JoinTable,
}

#[derive(Clone, Debug)]
pub enum KeyLemmaOutcome {
    AlreadySubsemilattice,
    Extended(KeyLemmaStep),
}

pub fn key_lemma_extension(l: &Poset, s: Mask) -> Result<KeyLemmaOutcome, KeyLemmaError> {
    if !l.is_join_semilattice() {
        return Err(KeyLemmaError::HostNotASemilattice);
    }
    let s = s & l.all();
    if s == 0 {
        return Err(KeyLemmaError::NotASubposetSemilattice);
    }
    let sj = SubJoin::new(l, s)?;
    let s_elems: Vec<usize> = members(s).collect();
    // elements of S that are an S-join differing from the host join
    let mut bad: Mask = 0;
    for &a in &s_elems {
        for &b in &s_elems {
            if sj.join(a, b) != l.join(a, b).unwrap() {
                bad |= bit(sj.join(a, b));
            }
        }
    }
    if bad == 0 {
        return Ok(KeyLemmaOutcome::AlreadySubsemilattice);
    }
    let j = members(l.minimal_elements(bad)).next().unwrap();
    let pair = s_elems
        .iter()
        .flat_map(|&a| s_elems.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| a < b && sj.join(a, b) == j && l.join(a, b) != Some(j))
        .expect("j is witnessed");
    let d = l.join(pair.0, pair.1).unwrap();
    let b = s | bit(d);
    let down_d = s & l.down_set(d);
    let rule = |x: usize, y: usize| -> usize {
        if l.leq(x, y) {
            y
        } else if l.leq(y, x) {
            x
        } else if y == d {
            sj.join(x, j)
        } else if x == d {
            sj.join(j, y)
        } else if sj.join(x, y) != j {
            sj.join(x, y)
        } else if bit(x) & down_d == 0 || bit(y) & down_d == 0 {
            j
        } else {
            d
        }
    };
    let b_elems: Vec<usize> = members(b).collect();
    let pos = |x: usize| b_elems.iter().position(|&e| e == x).unwrap();
    let k = b_elems.len();
    let mut table = Vec::with_capacity(k * k);
    for &x in &b_elems {
        for &y in &b_elems {
            table.push(pos(rule(x, y)) as u8);
        }
    }
    Ok(KeyLemmaOutcome::Extended(KeyLemmaStep {
        s,
        b,
        d,
        j,
        pair,
        rule_table: JoinTable::from_rows(k, table),
    }))
}

/// Joins inside an induced subposet, reported as host indices.
struct SubJoin {
    table: JoinTable,
    elems: Vec<usize>,
    pos: Vec<usize>,
}

impl SubJoin {
    fn new(l: &Poset, s: Mask) -> Result<SubJoin, KeyLemmaError> {
        let (sub, elems) = l.induced(s);
        let table = sub.join_table().map_err(|_| KeyLemmaError::NotASubposetSemilattice)?;
        let mut pos = vec![usize::MAX; l.len()];
        for (i, &x) in elems.iter().enumerate() {
            pos[x] = i;
        }
        Ok(SubJoin { table, elems, pos })
    }

    fn join(&self, x: usize, y: usize) -> usize {
        self.elems[self.table.join(self.pos[x], self.pos[y])]
    }
}

/// What went wrong when re-checking an extension step.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyLemmaViolation {
    #[error("B is not a join-semilattice")]
    NotASemilattice,
    #[error("the case rules disagree with B's join at ({0}, {1})")]
    RuleMismatch(usize, usize),
    #[error("d does not have j as its only upper cover")]
    CoverFact,
    #[error("|Sub B| = {0} exceeds twice |Sub S| = {1}")]
    DoublingBound(BigUint, BigUint),
    #[error("a subuniverse of S has {0} preimages")]
    PreimageCount(usize),
}

impl KeyLemmaStep {
    /// Re-derives every property the construction promises.
    pub fn verify(&self, l: &Poset) -> Result<(), KeyLemmaViolation> {
        let (bp, b_elems) = l.induced(self.b);
        let bt = bp.join_table().map_err(|_| KeyLemmaViolation::NotASemilattice)?;
        let k = b_elems.len();
        for x in 0..k {
            for y in 0..k {
                if bt.join(x, y) != self.rule_table.join(x, y) {
                    return Err(KeyLemmaViolation::RuleMismatch(b_elems[x], b_elems[y]));
                }
            }
        }
        let d = b_elems.iter().position(|&e| e == self.d).unwrap();
        let j = b_elems.iter().position(|&e| e == self.j).unwrap();
        if bp.upper_covers(d) != bit(j) {
            return Err(KeyLemmaViolation::CoverFact);
        }

        let (sp, s_elems) = l.induced(self.s);
        let gs = PartialGroupoid::from_join_semilattice(&sp.join_table().unwrap());
        let gb = PartialGroupoid::from_join_semilattice(&bt);
        let (count_s, count_b) = (count_subuniverses(&gs), count_subuniverses(&gb));
        if count_b > &count_s * 2u32 {
            return Err(KeyLemmaViolation::DoublingBound(count_b, count_s));
        }

        // phi(X) = [X - {d}]_S, in S's own indices
        let b_to_s: Vec<Option<usize>> =
            b_elems.iter().map(|x| s_elems.iter().position(|y| y == x)).collect();
        let mut preimages: BTreeMap<Mask, usize> = BTreeMap::new();
        for x in subuniverses(&gb).expect("small") {
            let rest = members(x).filter_map(|i| b_to_s[i]).fold(0, |m, i| m | bit(i));
            *preimages.entry(generated_subuniverse(&gs, rest)).or_default() += 1;
        }
        for y in subuniverses(&gs).expect("small") {
            match preimages.get(&y).copied().unwrap_or(0) {
                1 | 2 => {}
                c => return Err(KeyLemmaViolation::PreimageCount(c)),
            }
        }
        Ok(())
    }
}

/// Applies the extension until `S` has grown into a subsemilattice of `l`.
pub fn key_lemma_chain(l: &Poset, s: Mask) -> Result<Vec<KeyLemmaStep>, KeyLemmaError> {
    let mut steps = Vec::new();
    let mut current = s;
    loop {
        match key_lemma_extension(l, current)? {
            KeyLemmaOutcome::AlreadySubsemilattice => return Ok(steps),
            KeyLemmaOutcome::Extended(step) => {
                current = step.b;
                steps.push(step);
                assert!(current.count_ones() as usize <= l.len() && steps.len() <= l.len());
            }
        }
    }
}

/// Whether the elements of `s` are closed under the host join.
pub fn is_subsemilattice(l: &Poset, s: Mask) -> bool {
    members(s).all(|x| members(s).all(|y| l.join(x, y).is_some_and(|z| s & bit(z) != 0)))
}

/// All nonempty `s` whose induced subposet is a join-semilattice.
pub fn subposet_semilattices(l: &Poset) -> impl Iterator<Item = Mask> + '_ {
    (1..=full_mask(l.len())).filter(move |&s| l.induced(s).0.is_join_semilattice())
}
