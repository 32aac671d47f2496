//! Isomorph-free generation of small join-semilattices and lattices, and the
//! census built on top of them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::order::{bit, full_mask, members, Mask, OrderError, Poset};
use crate::pgroupoid::PartialGroupoid;
use crate::planarity::{semilattice_verdict, PlanarityError, PlanarityVerdict, Verdict};
use crate::subcount::{count_subuniverses, DyadicValue};

pub const MAX_SEMILATTICE: usize = 8;
pub const MAX_LATTICE: usize = 9;
pub const GENERATOR_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("size {size} exceeds the enumeration bound {max}")]
    SizeLimitExceeded { size: usize, max: usize },
    #[error(transparent)]
    Planarity(#[from] PlanarityError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Pairs with a common upper bound have a least one.
fn joins_where_bounded(up: &[Mask]) -> bool {
    let n = up.len();
    (0..n).all(|x| {
        (x + 1..n).all(|y| {
            let ub = up[x] & up[y];
            ub == 0 || members(ub).any(|z| up[z] & ub == ub)
        })
    })
}

/// Pairs with a common lower bound have a greatest one.
fn meets_where_bounded(up: &[Mask]) -> bool {
    let n = up.len();
    let down: Vec<Mask> = (0..n).map(|x| (0..n).filter(|&y| up[y] & bit(x) != 0).fold(0, |m, y| m | bit(y))).collect();
    joins_where_bounded(&down)
}

/// Down-closed subsets of a poset given by up-sets.
fn down_sets(up: &[Mask]) -> Vec<Mask> {
    let n = up.len();
    let down: Vec<Mask> = (0..n).map(|x| (0..n).filter(|&y| up[y] & bit(x) != 0).fold(0, |m, y| m | bit(y))).collect();
    (0..=full_mask(n))
        .filter(|&s| members(s).all(|x| down[x] & !s == 0))
        .collect()
}

/// Isomorphism classes of posets on `k` elements satisfying `keep`, grown one
/// maximal element at a time. `keep` must survive deleting a maximal element.
fn interiors(k: usize, keep: &(dyn Fn(&[Mask]) -> bool + Sync)) -> Vec<Vec<Mask>> {
    let mut level: Vec<Vec<Mask>> = vec![Vec::new()];
    for size in 0..k {
        let next: BTreeSet<String> = level
            .par_iter()
            .flat_map_iter(|up| {
                down_sets(up).into_iter().filter_map(move |below| {
                    let mut ext: Vec<Mask> =
                        up.iter().enumerate().map(|(x, &u)| if below & bit(x) != 0 { u | bit(size) } else { u }).collect();
                    ext.push(bit(size));
                    keep(&ext).then(|| Poset::from_up_sets(ext).unwrap().canonical_form().unwrap().certificate)
                })
            })
            .collect();
        level = next.iter().map(|c| Poset::from_certificate(c).unwrap().up_sets().to_vec()).collect();
    }
    level
}

fn with_top(up: &[Mask]) -> Poset {
    let k = up.len();
    let mut all: Vec<Mask> = up.iter().map(|&u| u | bit(k)).collect();
    all.push(bit(k));
    Poset::from_up_sets(all).unwrap()
}

fn canonical_sorted(posets: impl IntoIterator<Item = Poset>) -> Vec<Poset> {
    let certs: BTreeSet<String> = posets.into_iter().map(|p| p.canonical_form().unwrap().certificate).collect();
    certs.iter().map(|c| Poset::from_certificate(c).unwrap()).collect()
}

/// One representative per isomorphism class of `n`-element join-semilattices,
/// each in canonical labelling, ordered by certificate.
pub fn all_join_semilattices(n: usize) -> Result<Vec<Poset>, EnumerateError> {
    if n > MAX_SEMILATTICE {
        return Err(EnumerateError::SizeLimitExceeded { size: n, max: MAX_SEMILATTICE });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(canonical_sorted(interiors(n - 1, &joins_where_bounded).iter().map(|up| with_top(up))))
}

/// One representative per isomorphism class of `n`-element lattices, built as
/// bottom + interior + top with both join and meet conditions on the interior.
pub fn all_lattices(n: usize) -> Result<Vec<Poset>, EnumerateError> {
    if n > MAX_LATTICE {
        return Err(EnumerateError::SizeLimitExceeded { size: n, max: MAX_LATTICE });
    }
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![Poset::chain(1)]),
        _ => {
            let keep = |up: &[Mask]| joins_where_bounded(up) && meets_where_bounded(up);
            Ok(canonical_sorted(interiors(n - 2, &keep).iter().map(|up| with_top(up).add_bottom())))
        }
    }
}

/// A random `n`-element join-semilattice: elements are added one at a time
/// above a random down-closed set, keeping the join condition, then a top.
pub fn random_join_semilattice(n: usize, seed: u64) -> Poset {
    assert!((1..=64).contains(&n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut up: Vec<Mask> = Vec::new();
    while up.len() < n - 1 {
        let k = up.len();
        let pick: Mask = (0..k).filter(|_| rng.gen_bool(0.3)).fold(0, |m, x| m | bit(x));
        // down-closure of the pick
        let below: Mask = (0..k).filter(|&x| up[x] & pick != 0).fold(0, |m, x| m | bit(x));
        let mut ext: Vec<Mask> = up.iter().enumerate().map(|(x, &u)| if below & bit(x) != 0 { u | bit(k) } else { u }).collect();
        ext.push(bit(k));
        if joins_where_bounded(&ext) {
            up = ext;
        }
    }
    with_top(&up)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub certificate: String,
    pub size: usize,
    pub sub_count: BigUint,
    pub sigma: DyadicValue,
    pub verdict: Option<PlanarityVerdict>,
}

impl CensusRow {
    pub fn poset(&self) -> Poset {
        Poset::from_certificate(&self.certificate).expect("census certificates decode")
    }

    pub fn record(&self) -> CensusRecord {
        CensusRecord {
            certificate: self.certificate.clone(),
            sub_count: self.sub_count.clone(),
            sigma: self.sigma.clone(),
            verdict: self.verdict.as_ref().map(|v| v.verdict),
        }
    }
}

pub fn measure(p: &Poset, with_planarity: bool) -> Result<CensusRow, EnumerateError> {
    let sub = count_subuniverses(&PartialGroupoid::from_join_semilattice(&p.join_table()?));
    Ok(CensusRow {
        certificate: p.canonical_form()?.certificate,
        size: p.len(),
        sigma: DyadicValue::sigma(sub.clone(), p.len()),
        sub_count: sub,
        verdict: if with_planarity { Some(semilattice_verdict(p)?) } else { None },
    })
}

/// Every `n`-element join-semilattice with its counts and optional verdict,
/// ordered by certificate.
pub fn census(n: usize, with_planarity: bool) -> Result<Vec<CensusRow>, EnumerateError> {
    let all = all_join_semilattices(n)?;
    all.par_iter().map(|p| measure(p, with_planarity)).collect()
}

/// A census row as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub certificate: String,
    pub sub_count: BigUint,
    pub sigma: DyadicValue,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusFile {
    pub n: usize,
    pub version: String,
    pub records: Vec<CensusRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("census file line {line}: {reason}")]
pub struct CensusFileError {
    pub line: usize,
    pub reason: String,
}

impl CensusFile {
    pub fn from_rows(n: usize, rows: &[CensusRow]) -> CensusFile {
        CensusFile { n, version: GENERATOR_VERSION.to_string(), records: rows.iter().map(CensusRow::record).collect() }
    }

    /// Header `# census n=<n> generator=<version>`, then tab-separated
    /// `certificate sub_count sigma verdict` rows; `-` marks a missing verdict.
    pub fn render(&self) -> String {
        let mut out = format!("# census n={} generator={}\n", self.n, self.version);
        for r in &self.records {
            let verdict = r.verdict.map_or("-".to_string(), |v| v.to_string());
            writeln!(out, "{}\t{}\t{}\t{}", r.certificate, r.sub_count, r.sigma, verdict).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<CensusFile, CensusFileError> {
        let err = |line: usize, reason: &str| CensusFileError { line, reason: reason.to_string() };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let rest = header.strip_prefix("# census ").ok_or_else(|| err(1, "missing header"))?;
        let mut n = None;
        let mut version = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("generator", v)) => version = Some(v.to_string()),
                _ => return Err(err(1, "unknown header field")),
            }
        }
        let n = n.ok_or_else(|| err(1, "header lacks n"))?;
        let version = version.ok_or_else(|| err(1, "header lacks generator"))?;
        let mut records = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [cert, sub, sigma, verdict] = fields[..] else {
                return Err(err(line_no, "expected four tab-separated fields"));
            };
            let p = Poset::from_certificate(cert).map_err(|_| err(line_no, "bad certificate"))?;
            if p.len() != n {
                return Err(err(line_no, "certificate size differs from header"));
            }
            let sub_count: BigUint = sub.parse().map_err(|_| err(line_no, "bad sub count"))?;
            let sigma: DyadicValue = sigma.parse().map_err(|_| err(line_no, "bad sigma"))?;
            if sigma != DyadicValue::sigma(sub_count.clone(), n) {
                return Err(err(line_no, "sigma does not match sub count"));
            }
            let verdict = match verdict {
                "-" => None,
                v => Some(v.parse::<Verdict>().map_err(|_| err(line_no, "bad verdict"))?),
            };
            records.push(CensusRecord { certificate: cert.to_string(), sub_count, sigma, verdict });
        }
        Ok(CensusFile { n, version, records })
    }
}
