//! Series builders for both sides of every identity.
//!
//! Outer summations stop at the first index whose summand has minimal
//! `q`-exponent beyond the truncation; the minimal exponents grow
//! monotonically in every index, so nothing retained is lost. Each builder
//! takes `slack`, a count of extra outer indices to include past the cutoff,
//! which tests use to confirm that claim.

use num_bigint::BigInt;
use num_traits::One;

use crate::partitions::{
    count_eligible_rafts, has_k_sequence, is_d_distinct, oracle_gf, OracleTerm,
};
use crate::rafts::{enumerate_minimal, RaftedPartition};
use crate::series::{
    euler_tail, gaussian_binomial, pochhammer, pochhammer_inverse, xq_pochhammer,
    xq_pochhammer_inverse, PochhammerSpec, QSeries, XQSeries,
};

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn sign(k: usize) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Indices `0, 1, ...` while `exponent(i) <= order`, then `slack` more.
fn indices(
    order: usize,
    slack: usize,
    exponent: impl Fn(usize) -> usize,
) -> std::ops::Range<usize> {
    let cut = (0..)
        .find(|&i| exponent(i) > order)
        .expect("exponent grows");
    0..cut + slack
}

/// `(-q; q)_inf`.
pub fn distinct_parts(order: usize) -> QSeries {
    pochhammer(&PochhammerSpec::infinite(-1, 1, 1), order)
}

/// `1 / ((q^a; q^5)_inf (q^{5-a}; q^5)_inf)`.
fn mod5_product(a: usize, order: usize) -> QSeries {
    pochhammer_inverse(&PochhammerSpec::infinite(1, a, 5), order).mul_unchecked(
        &pochhammer_inverse(&PochhammerSpec::infinite(1, 5 - a, 5), order),
    )
}

/// Partitions into parts congruent to 1 or 4 mod 5.
pub fn rr1_product(order: usize) -> QSeries {
    mod5_product(1, order)
}

/// Partitions into parts congruent to 2 or 3 mod 5.
pub fn rr2_product(order: usize) -> QSeries {
    mod5_product(2, order)
}

/// `(q^2; q^2)_k^{-1}`.
fn inv_even_pochhammer(k: usize, order: usize) -> QSeries {
    pochhammer_inverse(&PochhammerSpec::finite(1, 2, 2, k), order)
}

/// `(q; q)_n^{-1}`.
fn inv_q_pochhammer(n: usize, order: usize) -> QSeries {
    pochhammer_inverse(&PochhammerSpec::finite(1, 1, 1, n), order)
}

/// `(-q; q)_inf * sum_j (-1)^j q^{e(j)} / ((q^2; q^2)_j (-q; q)_{len(j)})`,
/// the shape shared by the three single-sum identities.
fn slater_sum_side(
    order: usize,
    slack: usize,
    exponent: impl Fn(usize) -> usize,
    den_len: impl Fn(usize) -> usize,
) -> QSeries {
    let mut sum = QSeries::zero(order);
    for j in indices(order, slack, &exponent) {
        let mut t = inv_even_pochhammer(j, order);
        for i in 1..=den_len(j) {
            if i > order {
                break;
            }
            t.div_binomial_in_place(-1, i);
        }
        sum.add_shifted_scaled(&t, exponent(j), &sign(j));
    }
    sum.mul_unchecked(&distinct_parts(order))
}

/// `(-q;q)_inf sum_j (-1)^j q^{3j^2} / ((q^2;q^2)_j (-q;q)_{2j})`.
pub fn slater19_lhs(order: usize, slack: usize) -> QSeries {
    slater_sum_side(order, slack, |j| 3 * j * j, |j| 2 * j)
}

/// Exponent `3j^2 - 2j`, denominator `(-q;q)_{2j}`.
pub fn slater15_lhs(order: usize, slack: usize) -> QSeries {
    slater_sum_side(order, slack, |j| 3 * j * j - 2 * j, |j| 2 * j)
}

/// Exponent `3j^2 + 2j`, denominator `(-q;q)_{2j+1}`.
pub fn slater15_alt_lhs(order: usize, slack: usize) -> QSeries {
    slater_sum_side(order, slack, |j| 3 * j * j + 2 * j, |j| 2 * j + 1)
}

/// Least weight `C(3k+m, 2) - 3 C(k, 2) - m(k-1)` of a minimal partition
/// with `k` rafts whose top raft sits at `m + 3k - 2`.
pub fn minimal_exponent(k: usize, m: usize) -> usize {
    binom2(3 * k + m) - 3 * binom2(k) - m * (k - 1)
}

/// `sum_m q^{C(3k+m,2) - 3C(k,2)} [m+k-1, k-1]_{1/q} (-q^{3k+m+1}; q)_inf`,
/// with the reciprocal Gaussian polynomial folded into its prefactor as
/// `q^{-m(k-1)} [m+k-1, k-1]_q`.
pub fn minimal_formula(k: usize, order: usize, slack: usize) -> QSeries {
    assert!(k >= 1);
    let mut sum = QSeries::zero(order);
    let one = BigInt::one();
    for m in indices(order, slack, |m| minimal_exponent(k, m)) {
        let e = minimal_exponent(k, m);
        if e > order {
            continue;
        }
        let room = order - e;
        let gauss = gaussian_binomial(m + k - 1, k - 1, room);
        let tail = pochhammer(&PochhammerSpec::infinite(-1, 3 * k + m + 1, 1), room);
        sum.add_shifted_scaled(&gauss.mul_unchecked(&tail), e, &one);
    }
    sum
}

/// [`minimal_formula`] divided by `(q^2; q^2)_k`.
pub fn rafted_formula(k: usize, order: usize, slack: usize) -> QSeries {
    minimal_formula(k, order, slack).mul_unchecked(&inv_even_pochhammer(k, order))
}

/// Same sum with `x` marking the number of parts: the summand gains
/// `x^{2k+m}` and the tail becomes `(-x q^{3k+m+1}; q)_inf`.
pub fn minimal_formula_x(k: usize, x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    assert!(k >= 1);
    let mut sum = XQSeries::zero(x_trunc, q_trunc);
    for m in indices(q_trunc, slack, |m| minimal_exponent(k, m)) {
        let e = minimal_exponent(k, m);
        if e > q_trunc || 2 * k + m > x_trunc {
            continue;
        }
        let gauss = gaussian_binomial(m + k - 1, k - 1, q_trunc).shift(e);
        let tail = euler_tail(3 * k + m + 1, x_trunc, q_trunc);
        let term = tail.mul_q(&gauss).expect("same order").shift_x(2 * k + m);
        sum = sum.checked_add(&term).expect("same shape");
    }
    sum
}

pub fn rafted_formula_x(k: usize, x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    minimal_formula_x(k, x_trunc, q_trunc, slack)
        .mul_q(&inv_even_pochhammer(k, q_trunc))
        .expect("same order")
}

/// `(-q;q)_inf + sum_{k>=1} (-1)^k [rafted formula for k]`.
pub fn inclusion_exclusion_formula(order: usize, slack: usize) -> QSeries {
    let mut sum = distinct_parts(order);
    for k in indices(order, slack, |k| 3 * k * k).skip(1) {
        let t = rafted_formula(k, order, slack);
        sum.add_shifted_scaled(&t, 0, &sign(k));
    }
    sum
}

pub fn inclusion_exclusion_formula_x(x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    let mut sum = euler_tail(1, x_trunc, q_trunc);
    for k in indices(q_trunc, slack, |k| 3 * k * k).skip(1) {
        let t = rafted_formula_x(k, x_trunc, q_trunc, slack);
        sum = if k.is_multiple_of(2) {
            sum.checked_add(&t)
        } else {
            sum.checked_sub(&t)
        }
        .expect("same shape");
    }
    sum
}

/// `sum_n q^{n^2} x^n / (q; q)_n`.
pub fn squares_sum_x(x_trunc: usize, q_trunc: usize) -> XQSeries {
    let mut sum = XQSeries::zero(x_trunc, q_trunc);
    let one = BigInt::one();
    for n in (0..=x_trunc).take_while(|n| n * n <= q_trunc) {
        sum.add_shifted_to_slice(n, &inv_q_pochhammer(n, q_trunc), n * n, &one);
    }
    sum
}

/// `(-xq;q)_inf sum_k (-1)^k q^{3k^2} x^{2k} / ((q^2;q^2)_k (-xq;q)_{2k})`.
pub fn master_lhs(x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    let mut sum = XQSeries::zero(x_trunc, q_trunc);
    for k in indices(q_trunc, slack, |k| 3 * k * k) {
        if 2 * k > x_trunc {
            break;
        }
        let scalar = inv_even_pochhammer(k, q_trunc).shift(3 * k * k);
        let scalar = if k.is_multiple_of(2) {
            scalar
        } else {
            scalar.neg()
        };
        let den = xq_pochhammer_inverse(
            &PochhammerSpec::finite(-1, 1, 1, 2 * k),
            1,
            x_trunc,
            q_trunc,
        );
        let term = den.mul_q(&scalar).expect("same order").shift_x(2 * k);
        sum = sum.checked_add(&term).expect("same shape");
    }
    let full = xq_pochhammer(&PochhammerSpec::infinite(-1, 1, 1), 1, x_trunc, q_trunc);
    sum.checked_mul(&full).expect("same shape")
}

/// Triple sum over `(n, k, m)` of
/// `q^{C(n+1,2) + dC(n,2)} / (q;q)_n * (-1)^k q^{3k^2 + dC(2k,2)} / (q^2;q^2)_k
///  * (q^{2k};q)_m q^{dC(m,2)} (-q)^m / (q;q)_m * x^{n+2k+m} q^{2dnk + dnm + 2dkm}`.
pub fn staircase_triple_sum(d: usize, x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    let order = q_trunc;
    let exponent = |n: usize, k: usize, m: usize| {
        binom2(n + 1)
            + d * binom2(n)
            + 3 * k * k
            + d * binom2(2 * k)
            + d * binom2(m)
            + m
            + 2 * d * n * k
            + d * n * m
            + 2 * d * k * m
    };
    let inv_q: Vec<QSeries> = {
        let mut v = vec![QSeries::one(order)];
        for n in 1..=order.max(1) {
            v.push(v[n - 1].div_binomial(1, n));
        }
        v
    };
    let mut sum = XQSeries::zero(x_trunc, q_trunc);
    for k in indices(order, slack, |k| exponent(0, k, 0)) {
        let even = inv_even_pochhammer(k, order);
        // (1; q)_m vanishes for m >= 1
        let m_range = if k == 0 {
            0..1
        } else {
            indices(order, slack, |m| exponent(0, k, m))
        };
        for m in m_range {
            let rising = pochhammer(&PochhammerSpec::finite(1, 2 * k.max(1), 1, m), order);
            let km = even
                .mul_unchecked(&rising)
                .mul_unchecked(&inv_q[m.min(order)]);
            let s = sign(k + m);
            for n in indices(order, slack, |n| exponent(n, k, m)) {
                let e = exponent(n, k, m);
                if e > order || n + 2 * k + m > x_trunc {
                    continue;
                }
                let t = km.mul_to(&inv_q[n.min(order)], order - e);
                sum.add_shifted_to_slice(n + 2 * k + m, &t, e, &s);
            }
        }
    }
    sum
}

/// `C_k(x; q) = sum_{j,r} (-1)^j x^{kj+r} q^{(r+kj)(r+kj+1)/2 + k j(j-1)/2}
///  / ((q^k; q^k)_j (q; q)_r)`.
pub fn bmn_series(k: usize, x_trunc: usize, q_trunc: usize, slack: usize) -> XQSeries {
    assert!(k >= 2);
    let exponent = |j: usize, r: usize| binom2(r + k * j + 1) + k * binom2(j);
    let mut sum = XQSeries::zero(x_trunc, q_trunc);
    for j in indices(q_trunc, slack, |j| exponent(j, 0)) {
        let den_j = pochhammer_inverse(&PochhammerSpec::finite(1, k, k, j), q_trunc);
        for r in indices(q_trunc, slack, |r| exponent(j, r)) {
            let e = exponent(j, r);
            if e > q_trunc || k * j + r > x_trunc {
                continue;
            }
            let t = den_j.mul_unchecked(&inv_q_pochhammer(r, q_trunc));
            sum.add_shifted_to_slice(k * j + r, &t, e, &sign(j));
        }
    }
    sum
}

/// Left side of the q-Gauss sum at `a = q^a_exp`, `b = q^b_exp`, `c = q^c_exp`:
/// `sum_n (a;q)_n (b;q)_n (c/ab)^n / ((q;q)_n (c;q)_n)`.
pub fn qgauss_lhs(a_exp: usize, b_exp: usize, c_exp: usize, order: usize, slack: usize) -> QSeries {
    let ratio = c_exp - a_exp - b_exp;
    assert!(ratio >= 1 && a_exp >= 1 && b_exp >= 1);
    let mut sum = QSeries::zero(order);
    let one = BigInt::one();
    for n in indices(order, slack, |n| ratio * n) {
        let t = pochhammer(&PochhammerSpec::finite(1, a_exp, 1, n), order)
            .mul_unchecked(&pochhammer(&PochhammerSpec::finite(1, b_exp, 1, n), order))
            .mul_unchecked(&inv_q_pochhammer(n, order))
            .mul_unchecked(&pochhammer_inverse(
                &PochhammerSpec::finite(1, c_exp, 1, n),
                order,
            ));
        sum.add_shifted_scaled(&t, ratio * n, &one);
    }
    sum
}

/// `(c/a;q)_inf (c/b;q)_inf / ((c;q)_inf (c/ab;q)_inf)`.
pub fn qgauss_rhs(a_exp: usize, b_exp: usize, c_exp: usize, order: usize) -> QSeries {
    let inf = |s| PochhammerSpec::infinite(1, s, 1);
    pochhammer(&inf(c_exp - a_exp), order)
        .mul_unchecked(&pochhammer(&inf(c_exp - b_exp), order))
        .mul_unchecked(&pochhammer_inverse(&inf(c_exp), order))
        .mul_unchecked(&pochhammer_inverse(&inf(c_exp - a_exp - b_exp), order))
}

/// The `b -> 0` instance of q-Gauss used to collapse the inner sum:
/// `sum_m q^{C(m,2) + (2k+1)m} (q^k;q)_m / ((q;q)_m (-q^{3k+1};q)_m)`.
pub fn gauss_step_lhs(k: usize, order: usize, slack: usize) -> QSeries {
    assert!(k >= 1);
    let exponent = |m: usize| binom2(m) + (2 * k + 1) * m;
    let mut sum = QSeries::zero(order);
    let one = BigInt::one();
    for m in indices(order, slack, exponent) {
        let t = pochhammer(&PochhammerSpec::finite(1, k, 1, m), order)
            .mul_unchecked(&inv_q_pochhammer(m, order))
            .mul_unchecked(&pochhammer_inverse(
                &PochhammerSpec::finite(-1, 3 * k + 1, 1, m),
                order,
            ));
        sum.add_shifted_scaled(&t, exponent(m), &one);
    }
    sum
}

/// `(-q^{2k+1}; q)_inf / (-q^{3k+1}; q)_inf`.
pub fn gauss_step_rhs(k: usize, order: usize) -> QSeries {
    pochhammer(&PochhammerSpec::infinite(-1, 2 * k + 1, 1), order).mul_unchecked(
        &pochhammer_inverse(&PochhammerSpec::infinite(-1, 3 * k + 1, 1), order),
    )
}

// ---- enumeration oracles ----

/// Distinct-part partitions with consecutive parts at least `gap` apart,
/// by length and weight.
pub fn gap_oracle(gap: u32, x_trunc: usize, q_trunc: usize) -> XQSeries {
    oracle_gf(
        |p| is_d_distinct(p, gap),
        OracleTerm::counting,
        x_trunc,
        q_trunc,
    )
}

/// Distinct-part partitions with no run of length `k`.
pub fn no_k_sequence_oracle(k: u32, x_trunc: usize, q_trunc: usize) -> XQSeries {
    oracle_gf(
        |p| !has_k_sequence(p, k),
        OracleTerm::counting,
        x_trunc,
        q_trunc,
    )
}

/// `sum over partitions and designations of (-1)^{#rafts}`, summing the
/// `2^R` designations of each partition one by one.
pub fn signed_designation_oracle(order: usize) -> QSeries {
    let series = oracle_gf(
        |_| true,
        |p| {
            let r = count_eligible_rafts(p) as u32;
            let coeff = (0u64..1 << r)
                .map(|mask| if mask.count_ones() % 2 == 0 { 1 } else { -1 })
                .sum();
            OracleTerm {
                x_deg: 0,
                coeff,
                ..OracleTerm::counting(p)
            }
        },
        0,
        order,
    );
    series.slice(0)
}

/// Partitions with exactly `k` designated rafts, by length and weight; each
/// partition with `R` eligible rafts is counted once per designation.
pub fn rafted_oracle(k: usize, x_trunc: usize, q_trunc: usize) -> XQSeries {
    oracle_gf(
        |p| count_eligible_rafts(p) >= k,
        |p| {
            let r = count_eligible_rafts(p) as u32;
            let coeff = (0u64..1 << r)
                .filter(|m| m.count_ones() as usize == k)
                .count() as i64;
            OracleTerm {
                coeff,
                ..OracleTerm::counting(p)
            }
        },
        x_trunc,
        q_trunc,
    )
}

/// Minimal rafted partitions with `k` rafts, by length and weight.
pub fn minimal_oracle(k: usize, x_trunc: usize, q_trunc: usize) -> XQSeries {
    let mut table = vec![vec![0i64; q_trunc + 1]; x_trunc + 1];
    for beta in enumerate_minimal(k, q_trunc as u64) {
        let len = beta.parts().len();
        if len <= x_trunc {
            table[len][beta.weight() as usize] += 1;
        }
    }
    crate::partitions::table_to_series(table, x_trunc, q_trunc)
}

/// Weight of a rafted partition, for oracles built from explicit lists.
pub fn weight_series<'a, I>(items: I, order: usize) -> QSeries
where
    I: IntoIterator<Item = &'a RaftedPartition>,
{
    let mut counts = vec![0i64; order + 1];
    for rp in items {
        if let Some(c) = counts.get_mut(rp.weight() as usize) {
            *c += 1;
        }
    }
    QSeries::from_coeffs(counts, order)
}
