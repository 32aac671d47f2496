use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use semilat::catalog::{total_groupoid, Catalog, CatalogId, STRUCTURES};
use semilat::enumerate::{census, random_join_semilattice, CensusFile, MAX_SEMILATTICE};
use semilat::planarity::poset_verdict;
use semilat::spec::{render_result, StructureSpec};
use semilat::subcount::{count_subuniverses, count_subuniverses_naive, NAIVE_LIMIT};
use semilat::verify::{CheckId, Context, DEFAULT_SEED};
use semilat::{parse_specs, DyadicValue, PartialGroupoid, Poset};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "semilat", version, about = "Subuniverse counts, sigma values and planarity for small semilattices")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count subuniverses and print sigma for structure blocks or a catalog id.
    Count(Source),
    /// Decide whether a poset has a planar diagram.
    Planar(Source),
    /// Enumerate all join-semilattices of one size with their counts.
    Census {
        n: usize,
        /// Write the census here instead of standard output.
        #[arg(long)]
        census_file: Option<PathBuf>,
        /// Compare the existing census file with a fresh computation.
        #[arg(long, requires = "census_file")]
        check: bool,
        /// Skip the planarity verdicts.
        #[arg(long)]
        no_verdicts: bool,
    },
    /// Run the verification checks and print a checklist.
    VerifyPaper {
        /// Run only these checks (repeatable).
        #[arg(long)]
        only: Vec<CheckId>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Structure blocks to check in place of the bundled ones.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Time the naive and pruned counters against each other.
    Bench {
        /// Sizes of the random semilattices.
        #[arg(default_values_t = [8usize, 10, 12, 14])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct Source {
    /// Input file: structure blocks (or JSON) for `count`, a poset file for `planar`.
    #[arg(long, conflicts_with = "id")]
    input: Option<PathBuf>,
    /// Catalog id such as A0, dual-E_1, F0_nobottom or chain(4).
    #[arg(long)]
    id: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILED, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().expect("thread pool set once");
    }
    let result = match cli.command {
        Command::Count(src) => count(&src),
        Command::Planar(src) => planar(&src),
        Command::Census { n, census_file, check, no_verdicts } => {
            run_census(n, census_file.as_deref(), check, !no_verdicts)
        }
        Command::VerifyPaper { only, seed, input } => verify(&only, seed, input.as_deref()),
        Command::Bench { sizes, seed } => bench(&sizes, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn catalog_id(name: &str) -> Result<CatalogId, Failure> {
    name.parse().map_err(|e| usage(format!("{e}")))
}

fn pick<'a>(src: &'a Source) -> Result<Either<'a>, Failure> {
    match (&src.input, &src.id) {
        (Some(path), None) => Ok(Either::File(path)),
        (None, Some(id)) => Ok(Either::Id(catalog_id(id)?)),
        _ => Err(usage("give exactly one of --input or --id")),
    }
}

enum Either<'a> {
    File(&'a Path),
    Id(CatalogId),
}

fn report(name: &str, g: &PartialGroupoid) {
    let start = Instant::now();
    let sub = count_subuniverses(g);
    let sigma = DyadicValue::sigma(sub.clone(), g.len());
    print!("{}", render_result(name, &sub, &sigma));
    println!("elapsed {} ms", start.elapsed().as_millis());
}

fn count(src: &Source) -> Result<(), Failure> {
    match pick(src)? {
        Either::File(path) => {
            let text = read(path)?;
            let specs = if text.trim_start().starts_with('{') {
                StructureSpec::from_json(&text).map(|s| vec![s])
            } else {
                parse_specs(&text)
            }
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            for (i, spec) in specs.iter().enumerate() {
                let g = PartialGroupoid::from_spec(spec).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                if i > 0 {
                    println!();
                }
                report(&spec.name, &g);
            }
        }
        Either::Id(id) => {
            let entry = Catalog::standard().build(id).map_err(|e| usage(e.to_string()))?;
            let g = entry.groupoid.as_ref().ok_or_else(|| usage(format!("{id} has no operation to count")))?;
            let name = entry.spec.as_ref().map_or_else(|| id.name(), |s| s.name.clone());
            report(&name, g);
        }
    }
    Ok(())
}

fn planar(src: &Source) -> Result<(), Failure> {
    let p: Poset = match pick(src)? {
        Either::File(path) => {
            Poset::parse_text(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        Either::Id(id) => Catalog::standard()
            .build(id)
            .map_err(|e| usage(e.to_string()))?
            .poset
            .ok_or_else(|| usage(format!("{id} has no poset")))?,
    };
    let v = poset_verdict(&p).map_err(|e| usage(e.to_string()))?;
    println!("{}", v.describe(&p));
    Ok(())
}

fn run_census(n: usize, path: Option<&Path>, check: bool, verdicts: bool) -> Result<(), Failure> {
    if !(1..=MAX_SEMILATTICE).contains(&n) {
        return Err(usage(format!("census size must be between 1 and {MAX_SEMILATTICE}")));
    }
    let rows = census(n, verdicts).map_err(|e| failed(e.to_string()))?;
    let fresh = CensusFile::from_rows(n, &rows);
    match (path, check) {
        (Some(path), true) => {
            let stored = CensusFile::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if stored != fresh {
                return Err(failed(format!("{} does not match a fresh census of size {n}", path.display())));
            }
            eprintln!("{}: {} classes match", path.display(), stored.records.len());
        }
        (Some(path), false) => {
            fs::write(path, fresh.render()).map_err(|e| failed(format!("{}: {e}", path.display())))?;
            eprintln!("{}: {} classes written", path.display(), rows.len());
        }
        (None, _) => print!("{}", fresh.render()),
    }
    Ok(())
}

fn verify(only: &[CheckId], seed: u64, input: Option<&Path>) -> Result<(), Failure> {
    let ctx = match input {
        Some(path) => {
            Context::from_text(&read(path)?, seed).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => Context::from_text(STRUCTURES, seed).expect("bundled structures parse"),
    };
    let ids: Vec<CheckId> = if only.is_empty() { CheckId::ALL.to_vec() } else { only.to_vec() };
    let mut passed = 0;
    for &id in &ids {
        let outcome = ctx.run(id);
        println!("{outcome}");
        passed += usize::from(outcome.passed);
    }
    println!("{passed}/{} checks passed", ids.len());
    if passed == ids.len() {
        Ok(())
    } else {
        Err(failed(format!("{} checks failed", ids.len() - passed)))
    }
}

fn bench(sizes: &[usize], seed: u64) -> Result<(), Failure> {
    if let Some(&n) = sizes.iter().find(|&&n| n == 0 || n > NAIVE_LIMIT) {
        return Err(usage(format!("size {n} outside 1..={NAIVE_LIMIT}")));
    }
    let mut rows: Vec<(String, PartialGroupoid)> = Catalog::standard()
        .blocks()
        .filter_map(|e| Some((e.id.name(), e.groupoid.clone()?)))
        .collect();
    for &n in sizes {
        let p = random_join_semilattice(n, seed.wrapping_add(n as u64));
        rows.push((format!("random({n})"), total_groupoid(&p).expect("semilattice")));
    }
    println!("{:<16} {:>3} {:>10} {:>10} {:>10}  agree", "structure", "n", "|Sub|", "naive ms", "pruned ms");
    let mut all_agree = true;
    for (name, g) in &rows {
        let t = Instant::now();
        let naive = count_subuniverses_naive(g).map_err(|e| usage(e.to_string()))?;
        let naive_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let pruned = count_subuniverses(g);
        let pruned_ms = t.elapsed().as_secs_f64() * 1e3;
        let agree = naive == pruned;
        all_agree &= agree;
        println!("{name:<16} {:>3} {pruned:>10} {naive_ms:>10.3} {pruned_ms:>10.3}  {}", g.len(), if agree { "yes" } else { "NO" });
    }
    if all_agree {
        Ok(())
    } else {
        Err(failed("naive and pruned counts differ"))
    }
}
