//! The fourteen acceptance criteria, one test each. Every test prints a
//! PASS/FAIL line (visible with `--nocapture`) and fails on any failing check.

use gasgeom::verify::{run_criterion, CriterionResult, VerifyConfig};

fn criterion(id: u8) -> CriterionResult {
    let r = run_criterion(id, &VerifyConfig::default()).expect("known criterion");
    println!("{}", r.summary());
    for c in r.failing() {
        println!("    failing: {} = {:e} (tolerance {:e})", c.label, c.value, c.tolerance);
    }
    assert!(r.passed, "criterion {id} ({}) failed: {:?}", r.name, r.error);
    r
}

#[test]
fn c01_rigid_body_hyperbolicity() {
    criterion(1);
}

#[test]
fn c02_dual_hessian_constancy() {
    criterion(2);
}

#[test]
fn c03_partition_cross_validation() {
    criterion(3);
}

#[test]
fn c04_zero_rotation_inertia() {
    criterion(4);
}

#[test]
fn c05_faa_di_bruno_matches_finite_differences() {
    criterion(5);
}

#[test]
fn c06_order_four_closed_forms() {
    criterion(6);
}

#[test]
fn c07_moment_cumulant_duality() {
    criterion(7);
}

#[test]
fn c08_scaling_law() {
    criterion(8);
}

#[test]
fn c09_mixed_chart_block_diagonality() {
    criterion(9);
}

#[test]
fn c10_asymptotic_limits() {
    criterion(10);
}

#[test]
fn c11_curvature_limit() {
    criterion(11);
}

#[test]
fn c12_weak_limit_of_gibbs_measures() {
    criterion(12);
}

#[test]
fn c13_watson_lemma() {
    criterion(13);
}

#[test]
fn c14_poisson_algebra() {
    criterion(14);
}

#[test]
fn only_filter_selects_rigid_body_criteria() {
    let cfg = VerifyConfig { only: Some("rigidbody".into()), ..Default::default() };
    let report = gasgeom::verify::run_verification(&cfg).unwrap();
    let ids: Vec<u8> = report.criteria.iter().map(|c| c.id).collect();
    assert_eq!(ids, [1, 2]);
    assert!(report.passed);
}
