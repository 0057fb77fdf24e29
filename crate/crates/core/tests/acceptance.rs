//! Acceptance suite: one line per criterion, each pinned to its stated
//! tolerance. Criterion 11 (byte-identical CLI reports) lives with the CLI
//! crate's tests.

use std::time::Instant;

use critline_core::verify::{self, CheckResult};

fn report(result: &CheckResult, elapsed_limit: Option<(f64, f64)>) {
    let status = if result.passed { "PASS" } else { "FAIL" };
    match elapsed_limit {
        Some((elapsed, limit)) => println!(
            "{status} {} — {} [{elapsed:.1}s / limit {limit:.0}s]",
            result.name, result.details
        ),
        None => println!("{status} {} — {}", result.name, result.details),
    }
    assert!(result.passed, "{}: {}", result.name, result.details);
    if let Some((elapsed, limit)) = elapsed_limit {
        assert!(elapsed < limit, "{} exceeded its runtime budget", result.name);
    }
}

const SEED: u64 = 7;

#[test]
fn a01_qpe_closed_form_vs_circuit() {
    let start = Instant::now();
    let r = verify::check_qpe_circuit_agreement(SEED);
    report(&r, Some((start.elapsed().as_secs_f64(), 30.0)));
}

#[test]
fn a02_midpoint_and_symmetry() {
    report(&verify::check_midpoint_and_symmetry(), None);
}

#[test]
fn a03_pi2_over_24_bounds() {
    report(&verify::check_pi2_bounds(), None);
}

#[test]
fn a04_derivative_bound_with_noise() {
    report(&verify::check_derivative_bound(SEED), None);
}

#[test]
fn a05_encoded_string_tail() {
    report(&verify::check_encoded_tail(), None);
}

#[test]
fn a06_trotter_scaling() {
    let start = Instant::now();
    let r = verify::check_trotter_scaling();
    report(&r, Some((start.elapsed().as_secs_f64(), 120.0)));
}

#[test]
fn a07_energy_sandwich() {
    report(&verify::check_energy_sandwich(), None);
}

#[test]
fn a08_single_critical_point() {
    report(&verify::check_single_critical_point(), None);
}

#[test]
fn a09_two_param_critical_band() {
    report(&verify::check_two_param_band(), None);
}

#[test]
fn a10_gap_classification() {
    report(&verify::check_gap_classification(SEED), None);
}
