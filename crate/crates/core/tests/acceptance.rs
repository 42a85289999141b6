//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! and timings.

use std::time::Instant;

use varfun::suites::{self, CheckOutcome};

fn report(criterion: &str, started: Instant, outcomes: &[CheckOutcome]) {
    let failed: Vec<&CheckOutcome> = outcomes.iter().filter(|o| !o.passed).collect();
    let status = if failed.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[{status}] {criterion} ({} checks, {:.1}s)",
        outcomes.len(),
        started.elapsed().as_secs_f64()
    );
    for f in &failed {
        println!("    failed: {}: {}", f.name, f.detail);
    }
    assert!(
        failed.is_empty(),
        "{criterion}: {} of {} checks failed",
        failed.len(),
        outcomes.len()
    );
}

#[test]
fn criterion_01_composition_law() {
    let t = Instant::now();
    let outcomes = suites::composition_suite(42, 100, &[2, 3]);
    report(
        "criterion 1: composition law, 100 pairs x all representatives, n=2,3, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_02_degree_bound() {
    let t = Instant::now();
    let outcomes = suites::degree_bound_suite(42, 50, &[1, 2, 3]);
    report(
        "criterion 2: T_(g_c) polynomial of degree <= 3, 50 random c per representative, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_03_orbit_witnesses() {
    let t = Instant::now();
    let outcomes = suites::orbit_witness_suite(&[1, 2, 3], &[(2, 1), (3, 1), (3, 2)]);
    report(
        "criterion 3: II->III witnesses n=1,2,3 and I_k chains (2,1),(3,1),(3,2), exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_04_cubic_classifier() {
    let t = Instant::now();
    let outcomes = suites::cubic_classifier_suite(42, 100);
    report(
        "criterion 4: six representatives to four classes, invariant under 100 moves, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_05_lagrange_identity() {
    let t = Instant::now();
    let outcomes = suites::lagrange_suite(42, 50);
    report(
        "criterion 5: two-sided Lagrange identity on 50 problems + tree function k <= 6, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_06_measure_recovery() {
    let t = Instant::now();
    let outcomes = suites::recover_suite(8);
    report(
        "criterion 6: recovery oracles (multinomial n=2,3; 1/k!; all-ones) + round trip, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_07_kendall_ressel_abel() {
    let t = Instant::now();
    let outcomes = suites::kendall_abel_suite();
    report(
        "criterion 7: Kendall-Ressel and Abel variances for (lambda,c) in {(1,1),(2,1),(3,2)}, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_08_rouques_identities() {
    let t = Instant::now();
    let outcomes = suites::rouques_suite(42);
    report(
        "criterion 8: tilted-density identities (convolution 1e-12; normalization K=200; fixed point 1e-8; quadrature 1e-6)",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_09_symmetry_condition() {
    let t = Instant::now();
    let outcomes = suites::symmetry_condition_suite(42, 20, 4);
    report(
        "criterion 9: symmetry condition over the catalog n <= 4 + 20 stability cases, exact",
        t,
        &outcomes,
    );
}

#[test]
fn criterion_10_rank_one_decomposition() {
    let t = Instant::now();
    let outcomes = suites::rank_one_suite(42, 200, 50);
    report(
        "criterion 10: 200 exact rank-one reconstructions with branch coverage + 50 float cases < 1e-9",
        t,
        &outcomes,
    );
}
