//! The twelve acceptance criteria at full scale. Each test prints one
//! `PASS`/`FAIL` line straight to stdout, so the lines show even when the
//! harness captures output.

use std::io::Write;
use std::sync::OnceLock;

use vcl_lab::harness::verify::{
    criterion_conditional_error, criterion_determinism, criterion_estimator, criterion_event_mass,
    criterion_game_solver, criterion_halfspace, criterion_headline, criterion_indifference,
    criterion_marginal, criterion_one_inclusion, criterion_reduction, criterion_upper_shape,
    lower_bound_runs, verify, CriterionResult, LowerBoundRuns, Scale, VerifyOptions,
};

const FULL: VerifyOptions = VerifyOptions { seed: 0, scale: Scale::Full };

fn runs() -> &'static LowerBoundRuns {
    static RUNS: OnceLock<LowerBoundRuns> = OnceLock::new();
    RUNS.get_or_init(|| lower_bound_runs(&FULL).expect("lower-bound runs"))
}

fn report(r: &CriterionResult) {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{verdict} criterion {}: {}", r.id, r.title);
    for m in r.failures() {
        let _ = writeln!(out, "    {}: {} outside [{:?}, {:?}]", m.label, m.value, m.lo, m.hi);
    }
    let _ = out.flush();
}

fn check(r: CriterionResult, id: usize) {
    report(&r);
    assert_eq!(r.id, id);
    assert!(r.passed(), "criterion {id} failed: {:?}", r.failures());
}

#[test]
fn criterion_01_one_inclusion_loo() {
    let r = criterion_one_inclusion(&FULL).unwrap();
    assert!(r.measurements.iter().all(|m| m.hi == Some(0.0)));
    check(r, 1);
}

#[test]
fn criterion_02_game_value() {
    check(criterion_game_solver(&FULL).unwrap(), 2);
}

#[test]
fn criterion_03_tree_reduction() {
    check(criterion_reduction(&FULL).unwrap(), 3);
}

#[test]
fn criterion_04_event_mass() {
    // The lower limit is the exact bound less three standard errors.
    for (d, reports) in &runs().runs {
        for c in &reports[0].cells {
            let exact = (*d as f64 - 1.0) * (*d as f64).powi(-(c.kappa as i32)) / 4.0;
            assert!((c.p_g_bound - exact).abs() < 1e-15);
            assert_eq!(c.trials, 100_000);
        }
    }
    check(criterion_event_mass(runs()), 4);
}

#[test]
fn criterion_05_conditional_error() {
    check(criterion_conditional_error(runs()), 5);
}

#[test]
fn criterion_06_headline_rate() {
    let r = criterion_headline(runs());
    for m in &r.measurements {
        assert!(m.lo.unwrap() <= 0.8 * 3.0 / 72.0);
    }
    check(r, 6);
}

#[test]
fn criterion_07_upper_bound_shape() {
    check(criterion_upper_shape(&FULL).unwrap(), 7);
}

#[test]
fn criterion_08_estimator_hits_good_sizes() {
    check(criterion_estimator(&FULL).unwrap(), 8);
}

#[test]
fn criterion_09_halfspace_trees() {
    check(criterion_halfspace(&FULL).unwrap(), 9);
}

#[test]
fn criterion_10_indifference() {
    check(criterion_indifference(&FULL).unwrap(), 10);
}

#[test]
fn criterion_11_branch_marginal() {
    check(criterion_marginal(&FULL).unwrap(), 11);
}

#[test]
fn criterion_12_determinism() {
    let r = criterion_determinism(&FULL).unwrap();
    let quick = VerifyOptions { seed: 0, scale: Scale::Quick };
    let a = verify(&quick).unwrap().to_text();
    let b = verify(&quick).unwrap().to_text();
    assert_eq!(a, b, "two quick verify runs with one seed differ");
    check(r, 12);
}
