//! Runs every acceptance criterion once, in order, with a fixed seed, and
//! prints one PASS/FAIL line each. Runtime counts against the suite budget.
//!
//! Exits nonzero only when a criterion outside `EXPECTED_RED` fails, so the
//! known-unattainable ones stay visible without breaking the test run.

use std::process::ExitCode;

use fockflux_cli::suites::{SuiteContext, SUITES};

const SEED: u64 = 20_240_611;

/// The bounded two-mode norm does not survive truncation: the truncated norm
/// keeps growing with the cutoff.
const EXPECTED_RED: &[&str] = &["two-mode-escape"];

fn main() -> ExitCode {
    let ctx = SuiteContext::new(SEED);
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (k, suite) in SUITES.iter().enumerate() {
        let (ok, summary) = match suite.run(&ctx) {
            Ok(r) => {
                let in_budget = r.elapsed <= suite.budget;
                let mut parts: Vec<String> = r
                    .checks
                    .iter()
                    .map(|c| {
                        let s = if c.passed { "ok" } else { "FAILED" };
                        format!("{} {s} ({:.3e} vs {:.3e})", c.name, c.value, c.bound)
                    })
                    .collect();
                parts.push(format!(
                    "{:.1}s of {}s{}",
                    r.elapsed.as_secs_f64(),
                    suite.budget.as_secs(),
                    if in_budget { "" } else { " OVER BUDGET" }
                ));
                (r.passed() && in_budget, parts.join("; "))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {}: {summary}", k + 1, suite.name);
        if ok {
            passed += 1;
        } else if !EXPECTED_RED.contains(&suite.name) {
            unexpected.push(suite.name);
        }
    }
    println!("{passed}/{} criteria passed", SUITES.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
