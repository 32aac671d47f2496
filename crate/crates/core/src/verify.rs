//! The checks behind `verify-paper`: exact numerical claims, the lemma sweeps
//! and the planarity census results, each runnable on its own.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{
    enrich_crown, enrich_down_fence, enrich_up_fence, key_lemma_chain, sharpness_family, subposet_semilattices,
    total_groupoid, Catalog, CatalogError, CatalogId, UpFenceCase, STRUCTURES,
};
use crate::embed::contains_any;
use crate::enumerate::{all_lattices, census, random_join_semilattice, CensusRow};
use crate::order::{bit, members, Mask, Poset};
use crate::pgroupoid::{is_weak_subgroupoid, PartialGroupoid};
use crate::planarity::{kr_verdict, platt_planar_lattice, semilattice_verdict, Reason, Verdict};
use crate::spec::render_result;
use crate::subcount::{count_subuniverses, count_subuniverses_naive, DyadicValue};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    SigmaTable,
    Enrichment,
    CounterOracle,
    Monotonicity,
    ExtensionSweep,
    BottomExtension,
    Sharpness,
    Threshold,
    SmallPlanarity,
    CriteriaAgreement,
    GoldenBlocks,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::SigmaTable,
        CheckId::Enrichment,
        CheckId::CounterOracle,
        CheckId::Monotonicity,
        CheckId::ExtensionSweep,
        CheckId::BottomExtension,
        CheckId::Sharpness,
        CheckId::Threshold,
        CheckId::SmallPlanarity,
        CheckId::CriteriaAgreement,
        CheckId::GoldenBlocks,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::SigmaTable => "sigma-table",
            CheckId::Enrichment => "enrichment",
            CheckId::CounterOracle => "counter-oracle",
            CheckId::Monotonicity => "monotonicity",
            CheckId::ExtensionSweep => "extension-sweep",
            CheckId::BottomExtension => "bottom-extension",
            CheckId::Sharpness => "sharpness",
            CheckId::Threshold => "threshold",
            CheckId::SmallPlanarity => "small-planarity",
            CheckId::CriteriaAgreement => "criteria-agreement",
            CheckId::GoldenBlocks => "golden-blocks",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check {s:?}; expected one of {}", names().join(", ")))
    }
}

fn names() -> Vec<&'static str> {
    CheckId::ALL.iter().map(|c| c.name()).collect()
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark} {:<20} {:>9.3}s  {}", self.id.name(), self.elapsed.as_secs_f64(), self.detail)
    }
}

/// Inputs shared by the checks. Censuses are computed on first use.
pub struct Context {
    source: String,
    catalog: Catalog,
    seed: u64,
    small: OnceLock<Result<Vec<Vec<CensusRow>>, String>>,
}

impl Context {
    /// The bundled structures with the default seed.
    pub fn standard() -> Context {
        Context::from_text(STRUCTURES, DEFAULT_SEED).expect("bundled structures parse")
    }

    /// Checks run against `text` in place of the bundled structure blocks.
    pub fn from_text(text: &str, seed: u64) -> Result<Context, CatalogError> {
        Ok(Context { source: text.to_string(), catalog: Catalog::from_text(text)?, seed, small: OnceLock::new() })
    }

    pub fn with_seed(mut self, seed: u64) -> Context {
        self.seed = seed;
        self
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Census rows with verdicts for sizes 1 to 8, indexed by size - 1.
    fn censuses(&self) -> Result<&[Vec<CensusRow>], String> {
        self.small
            .get_or_init(|| (1..=8).map(|n| census(n, true).map_err(|e| e.to_string())).collect())
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: CheckId) -> CheckOutcome {
        let start = Instant::now();
        let result = match id {
            CheckId::SigmaTable => self.sigma_table(),
            CheckId::Enrichment => self.enrichment(),
            CheckId::CounterOracle => self.counter_oracle(),
            CheckId::Monotonicity => self.monotonicity(),
            CheckId::ExtensionSweep => self.extension_sweep(),
            CheckId::BottomExtension => self.bottom_extension(),
            CheckId::Sharpness => sharpness(),
            CheckId::Threshold => self.threshold(),
            CheckId::SmallPlanarity => self.small_planarity(),
            CheckId::CriteriaAgreement => criteria_agreement(),
            CheckId::GoldenBlocks => self.golden_blocks(),
        };
        let (passed, detail) = match result {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        CheckOutcome { id, passed, detail, elapsed: start.elapsed() }
    }

    pub fn run_all(&self) -> Vec<CheckOutcome> {
        CheckId::ALL.iter().map(|&id| self.run(id)).collect()
    }

    fn groupoid(&self, id: CatalogId) -> Result<&PartialGroupoid, String> {
        self.catalog.get(id).and_then(|e| e.groupoid.as_ref()).ok_or_else(|| format!("{id}: no groupoid"))
    }

    fn sigma_of(&self, id: CatalogId) -> Result<(BigUint, DyadicValue), String> {
        let g = self.groupoid(id)?;
        let sub = count_subuniverses(g);
        Ok((sub.clone(), DyadicValue::sigma(sub, g.len())))
    }

    fn compare_values(&self, table: &[(CatalogId, &str)]) -> Result<String, String> {
        let mut bad = Vec::new();
        for &(id, want) in table {
            let (sub, s) = self.sigma_of(id)?;
            let want: DyadicValue = want.parse().map_err(|_| format!("bad table value {want}"))?;
            let reported = self.catalog.get(id).and_then(|e| e.expected_sub.clone());
            if s != want || reported.as_ref() != Some(&sub) {
                bad.push(format!("{id}: sigma {} sub {sub} (reported {reported:?})", s.render(0)));
            }
        }
        if bad.is_empty() {
            Ok(format!("{} values exact", table.len()))
        } else {
            Err(bad.join("; "))
        }
    }

    fn sigma_table(&self) -> Result<String, String> {
        use CatalogId::*;
        self.compare_values(&[
            (A0, "122"),
            (B, "108"),
            (Bdual, "114"),
            (C, "123"),
            (Cdual, "113"),
            (D, "116"),
            (Ddual, "124"),
            (E0, "114"),
            (E0dual, "110"),
            (E1, "79.75"),
            (E1dual, "84.5"),
            (F0, "127"),
            (F1, "88.75"),
            (G0, "98.75"),
            (H0, "99.5"),
        ])
    }

    fn enrichment(&self) -> Result<String, String> {
        use CatalogId::*;
        let detail = self.compare_values(&[
            (DownFence9I, "123.5"),
            (Crown8I, "125"),
            (UpFence9Fail, "137"),
            (UpFence9Case1, "122"),
            (UpFence9Case2, "114.25"),
            (EnrichedFence8, "78"),
            (Snake10, "125.5"),
        ])?;
        for (built, id) in [
            (enrich_down_fence(), DownFence9I),
            (enrich_crown(), Crown8I),
            (enrich_up_fence(UpFenceCase::Fail), UpFence9Fail),
            (enrich_up_fence(UpFenceCase::Case1), UpFence9Case1),
            (enrich_up_fence(UpFenceCase::Case2), UpFence9Case2),
        ] {
            if !same_products(&built, self.groupoid(id)?) {
                return Err(format!("{id}: derived constraints differ from the block"));
            }
        }
        Ok(format!("{detail}; 5 derived enrichments match"))
    }

    fn counter_oracle(&self) -> Result<String, String> {
        let mut compared = 0;
        for e in self.catalog.entries() {
            let Some(g) = &e.groupoid else { continue };
            let naive = count_subuniverses_naive(g).map_err(|err| err.to_string())?;
            if naive != count_subuniverses(g) {
                return Err(format!("{}: pruned and naive counts differ", e.id));
            }
            compared += 1;
        }
        let mismatch = (0..200u64).into_par_iter().find_map_any(|i| {
            let n = 1 + (i as usize % 14);
            let p = random_join_semilattice(n, self.seed.wrapping_add(i));
            let g = total_groupoid(&p).expect("semilattice");
            (count_subuniverses_naive(&g).ok()? != count_subuniverses(&g)).then_some(i)
        });
        match mismatch {
            Some(i) => Err(format!("random semilattice #{i} disagrees")),
            None => Ok(format!("{compared} catalog structures and 200 random semilattices agree")),
        }
    }

    fn monotonicity(&self) -> Result<String, String> {
        let pairs = self.catalog.weak_pairs();
        for pair in &pairs {
            let (small, big) = pair.groupoids(&self.catalog);
            let s_small = DyadicValue::sigma(count_subuniverses(&small), small.len());
            let s_big = DyadicValue::sigma(count_subuniverses(&big), big.len());
            if s_small < s_big {
                return Err(format!("{} inside {}: {} < {}", pair.small, pair.big, s_small.render(0), s_big.render(0)));
            }
        }
        let failure = (0..500u64).into_par_iter().find_map_any(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (i << 20));
            let n = rng.gen_range(2..=12);
            let big = total_groupoid(&random_join_semilattice(n, rng.gen())).expect("semilattice");
            let (small, inject) = random_restriction(&big, &mut rng);
            if !is_weak_subgroupoid(&small, &big, &inject) {
                return Some(format!("restriction #{i} is not a weak subgroupoid"));
            }
            let s_small = DyadicValue::sigma(count_subuniverses(&small), small.len());
            let s_big = DyadicValue::sigma(count_subuniverses(&big), big.len());
            (s_small < s_big).then(|| format!("restriction #{i}: {} < {}", s_small.render(0), s_big.render(0)))
        });
        match failure {
            Some(f) => Err(f),
            None => Ok(format!("{} catalog pairs and 500 random restrictions", pairs.len())),
        }
    }

    fn extension_sweep(&self) -> Result<String, String> {
        let rows = self.censuses()?;
        let hosts: Vec<Poset> = rows[..7].iter().flatten().map(CensusRow::poset).collect();
        let results: Vec<Result<(usize, usize), String>> = hosts
            .par_iter()
            .map(|l| {
                let sigma_l = semilattice_sigma(l);
                let (mut subsets, mut steps) = (0, 0);
                for s in subposet_semilattices(l) {
                    subsets += 1;
                    let sub = l.induced(s).0;
                    if semilattice_sigma(&sub) < sigma_l {
                        return Err(format!("sigma drops on {} inside {l}", show(s)));
                    }
                    let chain = key_lemma_chain(l, s).map_err(|e| format!("{l}: {e}"))?;
                    for step in &chain {
                        step.verify(l).map_err(|e| format!("{l}, S = {}: {e}", show(step.s)))?;
                    }
                    steps += chain.len();
                }
                Ok((subsets, steps))
            })
            .collect();
        let (mut subsets, mut steps) = (0, 0);
        for r in results {
            let (a, b) = r?;
            subsets += a;
            steps += b;
        }
        Ok(format!("{} hosts, {subsets} subposet-semilattices, {steps} extension steps verified", hosts.len()))
    }

    fn bottom_extension(&self) -> Result<String, String> {
        let rows = self.censuses()?;
        let mut posets: Vec<(String, Poset)> = rows[..7].iter().flatten().map(|r| (r.certificate.clone(), r.poset())).collect();
        for e in self.catalog.entries() {
            if let Some(p) = e.poset.as_ref().filter(|p| p.is_join_semilattice()) {
                posets.push((e.id.name(), p.clone()));
            }
        }
        let bad = posets.par_iter().find_map_any(|(name, p)| {
            let here = semilattice_count(p);
            (semilattice_count(&p.add_bottom()) != here * 2u32).then(|| name.clone())
        });
        match bad {
            Some(name) => Err(format!("{name}: adding a bottom does not double the count")),
            None => Ok(format!("{} semilattices double", posets.len())),
        }
    }

    fn threshold(&self) -> Result<String, String> {
        let rows = self.censuses()?;
        let kr_entries = self.catalog.kr_members_up_to_nine();
        let kr: Vec<&Poset> = kr_entries.iter().filter_map(|e| e.poset.as_ref()).collect();
        let mut checked = 0;
        for row in rows.iter().flatten() {
            if row.sigma.cmp_integer(127).is_le() {
                continue;
            }
            checked += 1;
            let lifted = row.poset().add_bottom();
            if let Some((i, _)) = contains_any(&kr, &lifted) {
                return Err(format!("{}: bottom extension contains {}", row.certificate, kr_entries[i].id));
            }
            if platt_planar_lattice(&lifted).map_err(|e| e.to_string())?.is_some() {
                return Err(format!("{}: bottom extension fails the Platt test", row.certificate));
            }
            if row.verdict.as_ref().map(|v| v.verdict) != Some(Verdict::Planar) {
                return Err(format!("{}: verdict is not Planar", row.certificate));
            }
        }
        Ok(format!("{checked} semilattices with sigma > 127, all Planar"))
    }

    fn small_planarity(&self) -> Result<String, String> {
        let rows = self.censuses()?;
        let verdict = |r: &CensusRow| r.verdict.as_ref().map(|v| v.verdict);
        if let Some(r) = rows[..7].iter().flatten().find(|r| verdict(r) != Some(Verdict::Planar)) {
            return Err(format!("{} ({} elements) is not Planar", r.certificate, r.size));
        }
        let eight = &rows[7];
        let mut drawn = Vec::new();
        for r in eight.iter().filter(|r| r.sub_count >= BigUint::from(123u32)) {
            let v = r.verdict.as_ref().expect("census with verdicts");
            if v.verdict != Verdict::Planar {
                return Err(format!("{}: |Sub| = {} but {}", r.certificate, r.sub_count, v.verdict));
            }
            if platt_planar_lattice(&r.poset().add_bottom()).map_err(|e| e.to_string())?.is_some() {
                match v.reason {
                    Reason::DrawingWitness(id) => drawn.push((r.certificate.clone(), id)),
                    _ => return Err(format!("{}: non-Platt case without a stored drawing", r.certificate)),
                }
            }
        }
        let mut expected = Vec::new();
        for id in [CatalogId::CNoBottom, CatalogId::DdualNoBottom, CatalogId::F0NoBottom] {
            let p = self.catalog.get(id).and_then(|e| e.poset.as_ref()).ok_or_else(|| format!("{id}: no poset"))?;
            expected.push((p.canonical_form().map_err(|e| e.to_string())?.certificate, id));
        }
        drawn.sort();
        expected.sort();
        if drawn != expected {
            return Err(format!("drawn classes {drawn:?}, expected {expected:?}"));
        }
        let nonplanar: Vec<&CensusRow> = eight
            .iter()
            .filter(|r| r.sub_count == BigUint::from(122u32) && verdict(r) == Some(Verdict::NonPlanar))
            .collect();
        let a0 = self.catalog.get(CatalogId::A0).and_then(|e| e.poset.as_ref()).ok_or("A0: no poset")?;
        let a0_cert = a0.canonical_form().map_err(|e| e.to_string())?.certificate;
        if nonplanar.len() != 1 || nonplanar[0].certificate != a0_cert {
            return Err(format!("{} nonplanar classes with |Sub| = 122", nonplanar.len()));
        }
        if let Some(r) = eight.iter().find(|r| verdict(r) == Some(Verdict::Unknown)) {
            return Err(format!("{}: no verdict", r.certificate));
        }
        Ok(format!(
            "{} semilattices up to 7 elements Planar; 3 drawn classes at 8; A0 the only nonplanar class at 122",
            rows[..7].iter().map(Vec::len).sum::<usize>()
        ))
    }

    fn golden_blocks(&self) -> Result<String, String> {
        let lines: Vec<&str> = self.source.lines().collect();
        let mut done = 0;
        for e in self.catalog.blocks() {
            let spec = e.spec.as_ref().expect("block");
            let g = e.groupoid.as_ref().expect("block groupoid");
            let sub = count_subuniverses(g);
            let rendered = render_result(&spec.name, &sub, DyadicValue::sigma(sub.clone(), g.len()));
            let head = format!("Result for A={}:", spec.name);
            let at = lines.iter().position(|l| l.starts_with(&head)).ok_or_else(|| format!("{}: no result line", spec.name))?;
            let original = lines[at..(at + 2).min(lines.len())].iter().map(|l| format!("{l}\n")).collect::<String>();
            if rendered != original {
                return Err(format!("{}: rendered {rendered:?}, text has {original:?}", spec.name));
            }
            done += 1;
        }
        Ok(format!("{done} blocks reproduce their result lines byte for byte"))
    }
}

fn sharpness() -> Result<String, String> {
    for n in 9..=14 {
        let p = sharpness_family(n).map_err(|e| e.to_string())?;
        let want = BigUint::from(127u32) << (n - 8);
        let got = semilattice_count(&p);
        if got != want {
            return Err(format!("n = {n}: |Sub| = {got}, expected {want}"));
        }
        let v = semilattice_verdict(&p).map_err(|e| e.to_string())?;
        if v.verdict != Verdict::NonPlanar {
            return Err(format!("n = {n}: verdict {}", v.verdict));
        }
    }
    Ok("n = 9..14 hit 127 * 2^(n-8) and are NonPlanar".to_string())
}

fn criteria_agreement() -> Result<String, String> {
    let mut total = 0;
    for n in 1..=9 {
        let lattices = all_lattices(n).map_err(|e| e.to_string())?;
        total += lattices.len();
        let bad = lattices.par_iter().find_map_any(|p| {
            let check = || -> Result<Verdict, String> {
                let kr = kr_verdict(p).map_err(|e| e.to_string())?;
                let platt = platt_planar_lattice(p).map_err(|e| e.to_string())?;
                if kr.verdict == Verdict::Unknown {
                    return Err("unknown verdict".to_string());
                }
                if (kr.verdict == Verdict::Planar) != platt.is_none() {
                    return Err("criteria disagree".to_string());
                }
                let dual = kr_verdict(&p.dual()).map_err(|e| e.to_string())?;
                if dual.verdict != kr.verdict {
                    return Err("dual gets a different verdict".to_string());
                }
                Ok(kr.verdict)
            };
            check().err().map(|e| format!("{p}: {e}"))
        });
        if let Some(e) = bad {
            return Err(e);
        }
    }
    Ok(format!("{total} lattices up to 9 elements, no disagreement"))
}

fn semilattice_count(p: &Poset) -> BigUint {
    count_subuniverses(&total_groupoid(p).expect("semilattice"))
}

fn semilattice_sigma(p: &Poset) -> DyadicValue {
    DyadicValue::sigma(semilattice_count(p), p.len())
}

fn show(s: Mask) -> String {
    let parts: Vec<String> = members(s).map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Same labels and the same defined products.
fn same_products(a: &PartialGroupoid, b: &PartialGroupoid) -> bool {
    let (Some(la), Some(_)) = (a.labels(), b.labels()) else { return false };
    a.len() == b.len()
        && a.dom_len() == b.dom_len()
        && a.products().all(|p| {
            let idx = |x: usize| b.index_of(la[x]);
            match (idx(p.left), idx(p.right), idx(p.result)) {
                (Some(l), Some(r), Some(z)) => b.get(l, r) == Some(z),
                _ => false,
            }
        })
}

/// A random subset of `big`, restricted, with a random share of its products
/// forgotten.
fn random_restriction(big: &PartialGroupoid, rng: &mut ChaCha8Rng) -> (PartialGroupoid, Vec<usize>) {
    let n = big.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let keep = rng.gen_range(1..=n);
    let subset = order[..keep].iter().fold(0, |m, &x| m | bit(x));
    let (mut small, inject) = big.restrict(subset).expect("nonempty subset");
    let drop: Vec<(usize, usize)> =
        small.products().filter(|_| rng.gen_bool(0.3)).map(|p| (p.left, p.right)).collect();
    for (x, y) in drop {
        small.undefine(x, y);
    }
    (small, inject)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        assert!("sigma".parse::<CheckId>().is_err());
    }

    #[test]
    fn cheap_checks_pass() {
        let ctx = Context::standard();
        for id in [CheckId::SigmaTable, CheckId::Enrichment, CheckId::GoldenBlocks, CheckId::Sharpness] {
            let out = ctx.run(id);
            assert!(out.passed, "{out}");
        }
    }

    #[test]
    fn tampering_fails_the_table() {
        // drop the constraint f+g=c from F0
        let text = STRUCTURES.replacen("e+g=c  f+g=c\nResult for A=F_0", "e+g=c\nResult for A=F_0", 1);
        assert_ne!(text, STRUCTURES);
        let ctx = Context::from_text(&text, DEFAULT_SEED).unwrap();
        assert!(!ctx.run(CheckId::SigmaTable).passed);
        assert!(!ctx.run(CheckId::GoldenBlocks).passed);
    }

    #[test]
    fn restrictions_are_weak() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big = total_groupoid(&random_join_semilattice(9, 11)).unwrap();
        for _ in 0..50 {
            let (small, inject) = random_restriction(&big, &mut rng);
            assert!(is_weak_subgroupoid(&small, &big, &inject));
        }
    }
}
