//! The acceptance gate: one test per criterion, named so the default test
//! listing prints one pass/fail line per criterion.  Each test also prints a
//! summary line (visible under `--nocapture`) and asserts the criterion's
//! runtime budget.

use std::time::Instant;
use subwalk::report::{run_criterion, run_report, ReportConfig};

fn check(id: u32, budget_seconds: f64) {
    let cfg = ReportConfig::default();
    let start = Instant::now();
    let outcome = run_criterion(id, &cfg).expect("criterion execution error");
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion {:>2} ({}): {} — {} [{elapsed:.1}s]",
        outcome.id,
        outcome.name,
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.summary,
    );
    assert!(
        outcome.pass,
        "criterion {id} ({}) failed: {}",
        outcome.name, outcome.summary
    );
    assert!(
        elapsed < budget_seconds,
        "criterion {id} took {elapsed:.1}s, over its {budget_seconds:.0}s budget"
    );
}

#[test]
fn criterion_01_weight_routes_agree() {
    check(1, 10.0);
}

#[test]
fn criterion_02_kernel_routes_agree_and_compose() {
    check(2, 60.0);
}

#[test]
fn criterion_03_one_step_ratio_band() {
    check(3, 60.0);
}

#[test]
fn criterion_04_diagonal_scaling_band() {
    check(4, 300.0);
}

#[test]
fn criterion_05_two_sided_envelope_band() {
    check(5, 600.0);
}

#[test]
fn criterion_06_tail_probability_domination() {
    check(6, 30.0);
}

#[test]
fn criterion_07_tail_sum_domination() {
    check(7, 30.0);
}

#[test]
fn criterion_08_exit_time_scaling_band() {
    check(8, 300.0);
}

#[test]
fn criterion_09_hitting_probability_bound() {
    check(9, 300.0);
}

#[test]
fn criterion_10_running_maximum_level() {
    check(10, 300.0);
}

#[test]
fn criterion_11_harnack_ratio() {
    check(11, 600.0);
}

#[test]
fn criterion_12_exponential_sum_tail_domination() {
    check(12, 1.0);
}

#[test]
fn criterion_13_report_determinism() {
    // The aggregated report runs the other twelve criteria twice and passes
    // its determinism criterion only if the two payloads are byte-identical.
    // A two-worker pool doubles as a schedule-independence check: the bytes
    // must not depend on how criteria are distributed over workers.
    let cfg = ReportConfig::default();
    let start = Instant::now();
    let report = run_report(&cfg, 2).expect("report execution error");
    let elapsed = start.elapsed().as_secs_f64();
    let determinism = report
        .criteria
        .iter()
        .find(|c| c.id == 13)
        .expect("criterion 13 present");
    println!(
        "criterion 13 ({}): {} — {} [{elapsed:.1}s]",
        determinism.name,
        if determinism.pass { "PASS" } else { "FAIL" },
        determinism.summary,
    );
    assert_eq!(report.criteria.len(), 13);
    assert!(
        determinism.pass,
        "criterion 13 failed: {}",
        determinism.summary
    );
    assert!(report.all_pass, "aggregated report records a failure");
    assert!(
        elapsed < 1800.0,
        "full report took {elapsed:.1}s, over the 30-minute budget"
    );
}
