//! Runs every acceptance criterion against a fresh context, so each timing
//! includes the censuses it needs, and prints one line per criterion.

use std::process::ExitCode;
use std::time::Duration;

use semilat::verify::{CheckId, Context};

/// Every comparison inside the checks is exact equality of integers or dyadic
/// rationals; no tolerance is applied anywhere.
const TOLERANCE: u32 = 0;

const CRITERIA: [(u32, CheckId, Duration); 11] = [
    (1, CheckId::SigmaTable, Duration::from_secs(5)),
    (2, CheckId::Enrichment, Duration::from_secs(5)),
    (3, CheckId::CounterOracle, Duration::from_secs(60)),
    (4, CheckId::Monotonicity, Duration::from_secs(30)),
    (5, CheckId::ExtensionSweep, Duration::from_secs(600)),
    (6, CheckId::BottomExtension, Duration::from_secs(60)),
    (7, CheckId::Sharpness, Duration::from_secs(30)),
    (8, CheckId::Threshold, Duration::from_secs(900)),
    (9, CheckId::SmallPlanarity, Duration::from_secs(900)),
    (10, CheckId::CriteriaAgreement, Duration::from_secs(1200)),
    (11, CheckId::GoldenBlocks, Duration::from_secs(5)),
];

fn main() -> ExitCode {
    assert_eq!(TOLERANCE, 0);
    let mut failures = 0;
    for (number, id, limit) in CRITERIA {
        let outcome = Context::standard().run(id);
        let in_time = outcome.elapsed <= limit;
        let ok = outcome.passed && in_time;
        failures += usize::from(!ok);
        println!(
            "{} {number:>2} {:<20} {:>8.3}s (limit {}s){}  {}",
            if ok { "PASS" } else { "FAIL" },
            id.name(),
            outcome.elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { " too slow" },
            outcome.detail
        );
    }
    println!("{}/{} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
