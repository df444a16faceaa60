//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. `OSCILLA_SEED` overrides the seed of the randomized
//! sweeps.

use std::process::ExitCode;

use oscilla::acceptance::run_all;

fn main() -> ExitCode {
    let seed = std::env::var("OSCILLA_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let results = run_all(seed);
    println!();
    println!("acceptance suite (seed {seed})");
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    println!();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
