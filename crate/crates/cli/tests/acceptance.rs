//! Acceptance suite at full resolution.
//!
//! Runs without the libtest harness so that the PASS/FAIL line of every
//! criterion is always printed, not only on failure. Tolerances are the
//! constants in `gbbm_cli::verify::tol` and are echoed on each line.

use std::process::ExitCode;

use gbbm_cli::verify::{Mode, Suite, CRITERIA};
use gbbm_core::Verdict;

fn main() -> ExitCode {
    let suite = Suite::new(Mode::Thorough);
    println!("acceptance: {}", Mode::Thorough.describe());
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let outcome = suite.run(id);
        println!("{outcome}");
        if outcome.verdict != Verdict::Pass {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {}/{} criteria passed{}",
        CRITERIA.len() - failed.len(),
        CRITERIA.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; not passed: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
