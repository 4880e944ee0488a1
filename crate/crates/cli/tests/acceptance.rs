//! End-to-end acceptance checks, one per shipped guarantee.  Every test
//! drives a verification suite through the public API and prints a single
//! pass/fail line (visible with `--nocapture`, or on failure).

use ruled_cli::verify::{run_suite, VerifyConfig};
use ruled_core::DEFAULT_SEARCH_BUDGET;

fn check(criterion: u32, label: &str, suite: &str) {
    let cfg = VerifyConfig { seed: 0, steps: None, budget: DEFAULT_SEARCH_BUDGET };
    let report = run_suite(suite, &cfg).expect("suite is registered");
    if report.passed() {
        println!("criterion {criterion} ({label}): PASS - {} checks", report.checks);
    } else {
        println!(
            "criterion {criterion} ({label}): FAIL - {} of {} checks",
            report.failures.len(),
            report.checks
        );
        panic!("failures:\n{}", report.failures.join("\n"));
    }
}

#[test]
fn criterion_01_segre_table() {
    check(1, "segre table and section census", "segre-table");
}

#[test]
fn criterion_02_self_intersection() {
    check(2, "self-intersection numbers and the determinant formula", "self-intersection");
}

#[test]
fn criterion_03_descent_chain() {
    let cfg = VerifyConfig { seed: 0, steps: None, budget: DEFAULT_SEARCH_BUDGET };
    let report = run_suite("chain", &cfg).expect("suite is registered");
    assert!(
        report.millis < 1000,
        "ten-step chain took {}ms, the budget is one second",
        report.millis
    );
    if report.passed() {
        println!("criterion 3 (ten-step descent chain): PASS - {} checks", report.checks);
    } else {
        println!(
            "criterion 3 (ten-step descent chain): FAIL - {} of {} checks",
            report.failures.len(),
            report.checks
        );
        panic!("failures:\n{}", report.failures.join("\n"));
    }
}

#[test]
fn criterion_04_atiyah_constructions() {
    check(4, "indecomposable bundles built by transformations", "atiyah");
}

#[test]
fn criterion_05_crosscheck() {
    check(5, "model surgery against the descriptor rules", "crosscheck");
}

#[test]
fn criterion_06_riemann_roch() {
    check(6, "section-space dimensions", "riemann-roch");
}

#[test]
fn criterion_07_divisor_round_trip() {
    check(7, "principal divisors from their functions", "divisor-round-trip");
}

#[test]
fn criterion_08_isomorphism_oracle() {
    check(8, "isomorphism decision against brute force", "isomorphism");
}

#[test]
fn criterion_09_delta_kernel() {
    check(9, "Klein four-group of constant involutions", "delta-kernel");
}

#[test]
fn criterion_10_classification_rows() {
    check(10, "automorphism groups across all surface classes", "theorem-d");
}

#[test]
fn criterion_11_property_suites() {
    check(11, "gauge invariance, unit steps, round trips, canonical forms", "properties");
}
