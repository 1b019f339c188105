//! Prints one PASS/FAIL line per acceptance criterion.
//!
//! A failing criterion is reported, not asserted: the suite documents where
//! the asymptotic models and the reference solver disagree. The target only
//! exits nonzero if a check cannot run at all.

use std::process::ExitCode;

use cagecalc::acceptance::{run, CHECKS};

fn main() -> ExitCode {
    // `cargo test -- --list` and friends expect the harness protocol.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut errors = Vec::new();
    let mut passed = 0;
    for &(id, check) in CHECKS {
        let v = run(id, check);
        println!("{v}");
        if v.passed {
            passed += 1;
        }
        if v.detail.starts_with("error:") {
            errors.push(id);
        }
    }
    println!("{passed}/{} criteria passed", CHECKS.len());
    if errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("checks that could not run: {errors:?}");
        ExitCode::FAILURE
    }
}
