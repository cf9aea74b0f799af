//! Named identity checks: each builds two or more sides as truncated
//! series and reports exact agreement or the first differing coefficient.

pub mod sides;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::series::{QSeries, XQSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("parameter outside the valid domain: {0}")]
    ParameterDomain(String),
    #[error("unknown profile {0:?} (expected quick, standard or deep)")]
    UnknownProfile(String),
}

/// Truncation orders handed to the builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orders {
    pub q: usize,
    pub x: usize,
}

impl Orders {
    /// `x` truncation equal to the `q` truncation.
    pub fn square(n: usize) -> Self {
        Orders { q: n, x: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Standard,
    Deep,
}

impl Profile {
    pub fn order(self) -> usize {
        match self {
            Profile::Quick => 30,
            Profile::Standard => 60,
            Profile::Deep => 100,
        }
    }
}

impl FromStr for Profile {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Profile::Quick),
            "standard" => Ok(Profile::Standard),
            "deep" => Ok(Profile::Deep),
            _ => Err(IdentityError::UnknownProfile(s.to_string())),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum Series {
    Uni(QSeries),
    Bi(XQSeries),
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::Uni(s) => write!(f, "{s:?}"),
            Series::Bi(s) => write!(f, "{s:?}"),
        }
    }
}

type Builder = Arc<dyn Fn(Orders) -> Series + Send + Sync>;

/// One side of an identity.
#[derive(Clone)]
pub struct Side {
    pub label: String,
    build: Builder,
}

impl Side {
    pub fn uni(label: &str, f: impl Fn(usize) -> QSeries + Send + Sync + 'static) -> Self {
        Side {
            label: label.to_string(),
            build: Arc::new(move |o: Orders| Series::Uni(f(o.q))),
        }
    }

    pub fn bi(label: &str, f: impl Fn(usize, usize) -> XQSeries + Send + Sync + 'static) -> Self {
        Side {
            label: label.to_string(),
            build: Arc::new(move |o: Orders| Series::Bi(f(o.x, o.q))),
        }
    }

    pub fn build(&self, orders: Orders) -> Series {
        (self.build)(orders)
    }
}

/// A named identity with two or more sides that must agree exactly.
#[derive(Clone)]
pub struct IdentityCheck {
    name: String,
    bivariate: bool,
    sides: Vec<Side>,
}

impl fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.sides.iter().map(|s| s.label.as_str()).collect();
        write!(f, "IdentityCheck({}, {labels:?})", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstDiff {
    pub x: Option<usize>,
    pub q: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub q_trunc: usize,
    pub x_trunc: Option<usize>,
    pub passed: bool,
    pub first_diff: Option<FirstDiff>,
    pub millis: u64,
}

impl IdentityCheck {
    /// Sides must all be univariate or all bivariate.
    pub fn new(name: &str, bivariate: bool, sides: Vec<Side>) -> Self {
        assert!(sides.len() >= 2, "an identity needs two sides");
        IdentityCheck {
            name: name.to_string(),
            bivariate,
            sides,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_bivariate(&self) -> bool {
        self.bivariate
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// The same identity with its sides in reverse order.
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        out.sides.reverse();
        out
    }

    /// Builds every side and compares each against the first.
    pub fn run(&self, orders: Orders) -> CheckReport {
        let start = Instant::now();
        let built: Vec<Series> = self.sides.iter().map(|s| s.build(orders)).collect();
        let first_diff = built[1..]
            .iter()
            .find_map(|other| first_difference(&built[0], other));
        CheckReport {
            name: self.name.clone(),
            q_trunc: orders.q,
            x_trunc: self.bivariate.then_some(orders.x),
            passed: first_diff.is_none(),
            first_diff,
            millis: start.elapsed().as_millis() as u64,
        }
    }
}

/// Lowest `q`-exponent (then lowest `x`-degree) where the series differ.
pub fn first_difference(lhs: &Series, rhs: &Series) -> Option<FirstDiff> {
    let diff = |x, q, a: BigInt, b: BigInt| FirstDiff {
        x,
        q,
        lhs: a.to_string(),
        rhs: b.to_string(),
    };
    match (lhs, rhs) {
        (Series::Uni(a), Series::Uni(b)) => {
            assert_eq!(
                a.trunc_order(),
                b.trunc_order(),
                "sides disagree on truncation"
            );
            (0..=a.trunc_order())
                .find(|&e| a.coeffs()[e] != b.coeffs()[e])
                .map(|e| diff(None, e, a.coeff(e), b.coeff(e)))
        }
        (Series::Bi(a), Series::Bi(b)) => {
            assert_eq!(
                (a.x_trunc(), a.q_trunc()),
                (b.x_trunc(), b.q_trunc()),
                "sides disagree on truncation"
            );
            if a == b {
                return None;
            }
            (0..=a.q_trunc())
                .flat_map(|e| (0..=a.x_trunc()).map(move |n| (n, e)))
                .find(|&(n, e)| a.coeff(n, e) != b.coeff(n, e))
                .map(|(n, e)| diff(Some(n), e, a.coeff(n, e), b.coeff(n, e)))
        }
        _ => panic!("cannot compare univariate and bivariate sides"),
    }
}

/// Parameter triples `(a, b, c)` registered for the q-Gauss check.
pub const QGAUSS_TRIPLES: [(usize, usize, usize); 6] = [
    (1, 1, 3),
    (1, 2, 4),
    (2, 1, 4),
    (1, 1, 4),
    (2, 3, 6),
    (3, 3, 8),
];

pub fn qgauss_check(a: usize, b: usize, c: usize) -> Result<IdentityCheck, IdentityError> {
    if a == 0 || b == 0 || c <= a + b {
        return Err(IdentityError::ParameterDomain(format!(
            "q-gauss needs a, b >= 1 and c > a + b; got a={a}, b={b}, c={c}"
        )));
    }
    Ok(IdentityCheck::new(
        &format!("q-gauss-a{a}-b{b}-c{c}"),
        false,
        vec![
            Side::uni("sum", move |n| sides::qgauss_lhs(a, b, c, n, 0)),
            Side::uni("product", move |n| sides::qgauss_rhs(a, b, c, n)),
        ],
    ))
}

pub fn proof_gauss_step_check(k: usize) -> Result<IdentityCheck, IdentityError> {
    if k == 0 {
        return Err(IdentityError::ParameterDomain(
            "proof-gauss-step needs k >= 1".into(),
        ));
    }
    Ok(IdentityCheck::new(
        &format!("proof-gauss-step-k{k}"),
        false,
        vec![
            Side::uni("sum", move |n| sides::gauss_step_lhs(k, n, 0)),
            Side::uni("product", move |n| sides::gauss_step_rhs(k, n)),
        ],
    ))
}

pub fn minimal_gf_check(k: usize) -> IdentityCheck {
    IdentityCheck::new(
        &format!("minimal-gf-k{k}"),
        false,
        vec![
            Side::uni("formula", move |n| sides::minimal_formula(k, n, 0)),
            Side::uni("enumeration", move |n| {
                sides::weight_series(&crate::rafts::enumerate_minimal(k, n as u64), n)
            }),
        ],
    )
}

pub fn minimal_gf_x_check(k: usize) -> IdentityCheck {
    IdentityCheck::new(
        &format!("minimal-gf-x-k{k}"),
        true,
        vec![
            Side::bi("formula", move |x, q| sides::minimal_formula_x(k, x, q, 0)),
            Side::bi("enumeration", move |x, q| sides::minimal_oracle(k, x, q)),
        ],
    )
}

pub fn rafted_gf_check(k: usize) -> IdentityCheck {
    IdentityCheck::new(
        &format!("rafted-gf-k{k}"),
        false,
        vec![
            Side::uni("formula", move |n| sides::rafted_formula(k, n, 0)),
            Side::uni("enumeration", move |n| {
                sides::rafted_oracle(k, n, n).substitute_x(0)
            }),
        ],
    )
}

pub fn rafted_gf_x_check(k: usize) -> IdentityCheck {
    IdentityCheck::new(
        &format!("rafted-gf-x-k{k}"),
        true,
        vec![
            Side::bi("formula", move |x, q| sides::rafted_formula_x(k, x, q, 0)),
            Side::bi("enumeration", move |x, q| sides::rafted_oracle(k, x, q)),
        ],
    )
}

pub fn bmn_check(k: usize) -> Result<IdentityCheck, IdentityError> {
    if k < 2 {
        return Err(IdentityError::ParameterDomain("bmn needs k >= 2".into()));
    }
    Ok(IdentityCheck::new(
        &format!("bmn-k{k}"),
        true,
        vec![
            Side::bi("double-sum", move |x, q| sides::bmn_series(k, x, q, 0)),
            Side::bi("enumeration", move |x, q| {
                sides::no_k_sequence_oracle(k as u32, x, q)
            }),
        ],
    ))
}

pub fn staircase_check(d: usize) -> IdentityCheck {
    let mut list = vec![
        Side::bi("triple-sum", move |x, q| {
            sides::staircase_triple_sum(d, x, q, 0)
        }),
        Side::bi("enumeration", move |x, q| {
            sides::gap_oracle(2 + d as u32, x, q)
        }),
    ];
    if d == 0 {
        list.push(Side::bi("master-lhs", |x, q| sides::master_lhs(x, q, 0)));
    }
    IdentityCheck::new(&format!("staircase-d{d}"), true, list)
}

/// Every registered check, in a fixed order.
pub fn registry() -> Vec<IdentityCheck> {
    let mut checks = vec![
        IdentityCheck::new(
            "slater-19",
            false,
            vec![
                Side::uni("sum", |n| sides::slater19_lhs(n, 0)),
                Side::uni("product", sides::rr1_product),
            ],
        ),
        IdentityCheck::new(
            "slater-15",
            false,
            vec![
                Side::uni("sum", |n| sides::slater15_lhs(n, 0)),
                Side::uni("product", sides::rr2_product),
            ],
        ),
        // The sum side vanishes at q^1, so its product runs over parts 2, 3 mod 5.
        IdentityCheck::new(
            "slater-15-alt",
            false,
            vec![
                Side::uni("sum", |n| sides::slater15_alt_lhs(n, 0)),
                Side::uni("product", sides::rr2_product),
                Side::uni("master-at-x=q", |n| {
                    sides::master_lhs(n, n, 0).substitute_x(1)
                }),
            ],
        ),
    ];
    for k in 1..=3 {
        checks.push(minimal_gf_check(k));
        checks.push(minimal_gf_x_check(k));
    }
    for k in 1..=3 {
        checks.push(rafted_gf_check(k));
        checks.push(rafted_gf_x_check(k));
    }
    checks.push(IdentityCheck::new(
        "inclusion-exclusion",
        false,
        vec![
            Side::uni("formula", |n| sides::inclusion_exclusion_formula(n, 0)),
            Side::uni("signed-designations", sides::signed_designation_oracle),
            Side::uni("2-distinct", |n| sides::gap_oracle(2, n, n).substitute_x(0)),
            Side::uni("product", sides::rr1_product),
        ],
    ));
    checks.push(IdentityCheck::new(
        "inclusion-exclusion-x",
        true,
        vec![
            Side::bi("formula", |x, q| {
                sides::inclusion_exclusion_formula_x(x, q, 0)
            }),
            Side::bi("squares-sum", sides::squares_sum_x),
            Side::bi("2-distinct", |x, q| sides::gap_oracle(2, x, q)),
        ],
    ));
    checks.push(IdentityCheck::new(
        "master-identity",
        true,
        vec![
            Side::bi("lhs", |x, q| sides::master_lhs(x, q, 0)),
            Side::bi("squares-sum", sides::squares_sum_x),
        ],
    ));
    for k in 2..=4 {
        checks.push(bmn_check(k).expect("k >= 2"));
    }
    for d in 0..=3 {
        checks.push(staircase_check(d));
    }
    for (a, b, c) in QGAUSS_TRIPLES {
        checks.push(qgauss_check(a, b, c).expect("valid triple"));
    }
    for k in 1..=3 {
        checks.push(proof_gauss_step_check(k).expect("k >= 1"));
    }
    checks
}

pub fn names() -> Vec<String> {
    registry().iter().map(|c| c.name.clone()).collect()
}

/// Looks up the named checks, rejecting unknown names before any work.
pub fn select(names: &[String]) -> Result<Vec<IdentityCheck>, IdentityError> {
    let all = registry();
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|c| c.name == *n)
                .cloned()
                .ok_or_else(|| IdentityError::UnknownIdentity(n.clone()))
        })
        .collect()
}

/// Runs the checks concurrently; reports come back in input order.
pub fn run_all(checks: &[IdentityCheck], orders: Orders) -> Vec<CheckReport> {
    checks.par_iter().map(|c| c.run(orders)).collect()
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
