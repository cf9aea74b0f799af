use slater_rafts::identities::sides::{
    bmn_series, inclusion_exclusion_formula, master_lhs, minimal_formula, rafted_formula,
    slater15_alt_lhs, slater15_lhs, slater19_lhs, staircase_triple_sum,
};
use slater_rafts::identities::{
    self, qgauss_check, registry, run_all, IdentityCheck, Orders, Side,
};
use slater_rafts::series::QSeries;

#[test]
fn checks_are_symmetric_under_swapping_sides() {
    let orders = Orders::square(20);
    for check in registry() {
        let a = check.run(orders);
        let b = check.swapped().run(orders);
        assert_eq!(a.passed, b.passed, "{}", check.name());
        assert!(a.passed, "{}", check.name());
    }
}

#[test]
fn swapping_mirrors_a_reported_difference() {
    let check = IdentityCheck::new(
        "toy",
        false,
        vec![
            Side::uni("a", QSeries::one),
            Side::uni("b", |n| QSeries::one(n).mul_binomial(1, 3)),
        ],
    );
    let a = check.run(Orders::square(5)).first_diff.unwrap();
    let b = check.swapped().run(Orders::square(5)).first_diff.unwrap();
    assert_eq!((a.q, a.x), (3, None));
    assert_eq!((a.q, &a.lhs, &a.rhs), (b.q, &b.rhs, &b.lhs));
}

#[test]
fn extra_summation_terms_change_nothing() {
    let n = 40;
    for slack in 1..=3 {
        assert_eq!(slater19_lhs(n, 0), slater19_lhs(n, slack));
        assert_eq!(slater15_lhs(n, 0), slater15_lhs(n, slack));
        assert_eq!(slater15_alt_lhs(n, 0), slater15_alt_lhs(n, slack));
        assert_eq!(
            inclusion_exclusion_formula(n, 0),
            inclusion_exclusion_formula(n, slack)
        );
        assert_eq!(master_lhs(n, n, 0), master_lhs(n, n, slack));
        for k in 1..=3 {
            assert_eq!(minimal_formula(k, n, 0), minimal_formula(k, n, slack));
            assert_eq!(rafted_formula(k, n, 0), rafted_formula(k, n, slack));
        }
        for k in 2..=4 {
            assert_eq!(bmn_series(k, 25, 25, 0), bmn_series(k, 25, 25, slack));
        }
        for d in 0..=3 {
            assert_eq!(
                staircase_triple_sum(d, 25, 25, 0),
                staircase_triple_sum(d, 25, 25, slack)
            );
        }
    }
}

#[test]
fn perturbed_builder_is_caught() {
    let check = IdentityCheck::new(
        "slater-19-perturbed",
        false,
        vec![
            Side::uni("sum", |n| slater19_lhs(n, 0)),
            Side::uni("sum-plus-q^17", |n| {
                slater19_lhs(n, 0)
                    .checked_add(&QSeries::monomial(1, 17, n))
                    .unwrap()
            }),
        ],
    );
    let report = check.run(Orders::square(30));
    assert!(!report.passed);
    let diff = report.first_diff.expect("difference reported");
    assert_eq!(diff.q, 17);
    assert_eq!(diff.x, None);
    let base = slater19_lhs(30, 0).coeff(17);
    assert_eq!(diff.lhs, base.to_string());
    assert_eq!(diff.rhs, (base + 1u32).to_string());
    // below the perturbation the check passes
    assert!(check.run(Orders::square(16)).passed);
}

#[test]
fn empty_registry_gives_empty_report() {
    let reports = run_all(&[], Orders::square(30));
    assert!(reports.is_empty());
    assert!(identities::all_passed(&reports));
}

#[test]
fn reports_follow_registry_order() {
    let checks = registry();
    let reports = run_all(&checks, Orders::square(12));
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    let expected: Vec<&str> = checks.iter().map(|c| c.name()).collect();
    assert_eq!(names, expected);
    assert_eq!(identities::names(), expected);
}

#[test]
fn names_are_unique_and_kebab_case() {
    let names = identities::names();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len());
    assert!(names.iter().all(|n| n
        .chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')));
}

#[test]
fn unknown_names_are_rejected() {
    assert!(identities::select(&["slater-19".into(), "slater-20".into()]).is_err());
    assert_eq!(identities::select(&["bmn-k3".into()]).unwrap().len(), 1);
}

#[test]
fn cross_identity_web() {
    let n = 50;
    let master = master_lhs(n, n, 0);
    assert_eq!(master.substitute_x(0), slater19_lhs(n, 0));
    assert_eq!(master.substitute_x(1), slater15_alt_lhs(n, 0));
    let c2 = bmn_series(2, n, n, 0);
    assert_eq!(c2.substitute_x(0), slater19_lhs(n, 0));
    assert_eq!(c2.substitute_x(1), slater15_lhs(n, 0));
    assert_eq!(
        staircase_triple_sum(0, n, n, 0).substitute_x(0),
        master.substitute_x(0)
    );
    assert_eq!(inclusion_exclusion_formula(n, 0), slater19_lhs(n, 0));
}

#[test]
fn q_gauss_domain_is_enforced() {
    assert!(qgauss_check(1, 1, 2).is_err());
    assert!(qgauss_check(0, 1, 3).is_err());
    assert!(qgauss_check(1, 1, 3).is_ok());
    assert!(identities::bmn_check(1).is_err());
    assert!(identities::proof_gauss_step_check(0).is_err());
}

#[test]
fn report_json_schema_is_stable() {
    let check = IdentityCheck::new(
        "toy",
        true,
        vec![
            Side::bi("a", slater_rafts::series::XQSeries::one),
            Side::bi("b", |x, q| {
                slater_rafts::series::XQSeries::one(x, q).mul_binomial(-2, 1, 2)
            }),
        ],
    );
    let mut report = check.run(Orders { q: 4, x: 3 });
    report.millis = 0;
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(
        json,
        r#"{"name":"toy","q_trunc":4,"x_trunc":3,"passed":false,"first_diff":{"x":1,"q":2,"lhs":"0","rhs":"2"},"millis":0}"#
    );
    let ok = registry()[0].run(Orders::square(5));
    let value: serde_json::Value = serde_json::to_value(&ok).unwrap();
    let keys: Vec<&str> = value
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    assert_eq!(keys.len(), 6);
    assert!(value["x_trunc"].is_null() && value["first_diff"].is_null());
}
