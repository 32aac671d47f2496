use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use semilat::catalog::STRUCTURES;

fn semilat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semilat-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn count_by_id() {
    let o = semilat(&["count", "--id", "A0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with(
        "Result for A=A_0:  |Sub(A)| = 122, whence\nsigma(A) = |Sub(A)|*2^(8-|A|) =  122.0000000000000000 .\n"
    ));
    let out = stdout(&semilat(&["count", "--id", "dual-E_1"]));
    assert!(out.contains("|Sub(A)| = 676"), "{out}");
    let out = stdout(&semilat(&["count", "--id", "E1"]));
    assert!(out.contains("=   79.7500000000000000 ."), "{out}");
    let out = stdout(&semilat(&["count", "--id", "chain(4)"]));
    assert!(out.contains("|Sub(A)| = 16,") && out.contains(" 256.0000000000000000 ."), "{out}");
}

#[test]
fn golden_run_over_every_block() {
    let path = scratch("structures.txt", STRUCTURES);
    let o = semilat(&["count", "--input", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expected: Vec<&str> =
        STRUCTURES.lines().filter(|l| l.starts_with("Result for") || l.starts_with("sigma(A)")).collect();
    let produced = stdout(&o);
    let produced: Vec<&str> =
        produced.lines().filter(|l| l.starts_with("Result for") || l.starts_with("sigma(A)")).collect();
    assert_eq!(expected.len(), 46);
    assert_eq!(produced, expected);
}

#[test]
fn json_input() {
    let block = "x is the join-semilattice with edges\n ab\n|A|=2, A(without commas)={ab}. Constraints:\na+b=b\n";
    let spec = semilat::parse_spec(block).unwrap();
    let path = scratch("two.json", &spec.to_json());
    let out = stdout(&semilat(&["count", "--input", path.to_str().unwrap()]));
    assert!(out.contains("|Sub(A)| = 4,") && out.contains(" 256.0000000000000000 ."), "{out}");
}

#[test]
fn parse_errors_exit_two_with_a_line_number() {
    let path = scratch("bad.txt", "A is the join-semilattice with edges\n ab\n|A|=2, A(without commas)={ab}. Constraints:\na+z=b\n");
    let o = semilat(&["count", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
    assert_eq!(semilat(&["count", "--id", "nothing"]).status.code(), Some(2));
    assert_eq!(semilat(&["count"]).status.code(), Some(2));
    assert_eq!(semilat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(semilat(&["verify-paper", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn planar_verdicts() {
    let out = stdout(&semilat(&["planar", "--id", "F0"]));
    assert_eq!(out, "NonPlanar: contains F0 as subposet (identity)\n");
    let out = stdout(&semilat(&["planar", "--id", "C_nobottom"]));
    assert!(out.starts_with("Planar: stored drawing"), "{out}");
    let path = scratch("diamond.poset", "# a square with a top\nelements: abxyt\nedges: ax ay bx by xt yt\n");
    let o = semilat(&["planar", "--input", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Planar"), "{}", stdout(&o));
    let path = scratch("k33.poset", "elements: abcxyz\nedges: ax ay az bx by bz cx cy cz\n");
    assert!(stdout(&semilat(&["planar", "--input", path.to_str().unwrap()])).starts_with("NonPlanar"));
    let path = scratch("cycle.poset", "elements: ab\nedges: ab ba\n");
    assert_eq!(semilat(&["planar", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn census_writes_and_checks() {
    let dir = std::env::temp_dir().join(format!("semilat-census-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("census7.tsv");
    let p = path.to_str().unwrap();
    let o = semilat(&["census", "7", "--census-file", p]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# census n=7 generator=1\n"));
    assert_eq!(text.lines().count(), 1 + 222);
    assert!(semilat(&["census", "7", "--census-file", p, "--check"]).status.success());
    // flip one verdict
    let tampered = text.replacen("\tPlanar\n", "\tNonPlanar\n", 1);
    fs::write(&path, tampered).unwrap();
    assert_eq!(semilat(&["census", "7", "--census-file", p, "--check"]).status.code(), Some(1));
    assert_eq!(semilat(&["census", "9"]).status.code(), Some(2));
    // the output does not depend on the worker count
    let one = stdout(&semilat(&["--jobs", "1", "census", "6"]));
    let many = stdout(&semilat(&["--jobs", "4", "census", "6"]));
    assert_eq!(one, many);
}

#[test]
fn verify_paper_filters_and_fails_on_mutation() {
    let o = semilat(&["verify-paper", "--only", "sigma-table"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2, "{out}");
    assert!(out.starts_with("PASS sigma-table"));

    // F0 loses the constraint f+g=c
    let mutated = STRUCTURES.replacen("e+g=c  f+g=c\nResult for A=F_0", "e+g=c\nResult for A=F_0", 1);
    assert_ne!(mutated, STRUCTURES);
    let path = scratch("mutated.txt", &mutated);
    let o = semilat(&["verify-paper", "--input", path.to_str().unwrap(), "--only", "sigma-table"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL sigma-table") && stdout(&o).contains("F0"), "{}", stdout(&o));
}

#[test]
fn verify_paper_full_run() {
    let o = semilat(&["verify-paper"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 11);
    assert!(out.ends_with("11/11 checks passed\n"));
}

#[test]
fn bench_compares_counters() {
    let o = semilat(&["bench", "6", "14"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("random(14)") && !out.contains(" NO"), "{out}");
    assert_eq!(semilat(&["bench", "30"]).status.code(), Some(2));
}
