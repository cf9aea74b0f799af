//! Truncated formal power series in `q`, and in `(x, q)`, with exact
//! arbitrary-precision integer coefficients.
//!
//! A [`QSeries`] of truncation order `N` stores `c_0 ..= c_N` and represents
//! the residue class modulo `q^{N+1}`. Binary operations require equal
//! orders; changing the order is always an explicit [`QSeries::retruncate`].
//!
//! [`XQSeries`] is sparse in the `x`-degree: every stored slice is a
//! non-zero [`QSeries`] of order `q_trunc`, and absent degrees are zero.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation mismatch: {left:?} vs {right:?}")]
    TruncationMismatch {
        left: (Option<usize>, usize),
        right: (Option<usize>, usize),
    },
    #[error("constant term must be +1 or -1 to invert, found {0}")]
    NonUnitConstantTerm(BigInt),
    #[error("invalid pochhammer parameters: {0}")]
    InvalidPochhammer(&'static str),
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
}

fn mismatch_q(a: usize, b: usize) -> SeriesError {
    SeriesError::TruncationMismatch {
        left: (None, a),
        right: (None, b),
    }
}

/// Univariate series `c_0 + c_1 q + ... + c_N q^N + O(q^{N+1})`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(1, 0, order)
    }

    /// `c * q^exp`, or zero when `exp` lies beyond the truncation.
    pub fn monomial(c: i64, exp: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exp <= order {
            s.coeffs[exp] = BigInt::from(c);
        }
        s
    }

    /// Builds a series from leading coefficients; missing ones are zero and
    /// extra ones are dropped.
    pub fn from_coeffs<I, T>(coeffs: I, order: usize) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut s = Self::zero(order);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c.into();
        }
        s
    }

    /// Parses the decimal-string encoding produced by [`QSeries::to_decimal_strings`].
    pub fn from_decimal_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, SeriesError> {
        if items.is_empty() {
            return Err(SeriesError::BadCoefficient(String::new()));
        }
        let coeffs = items
            .iter()
            .map(|s| {
                s.as_ref()
                    .parse::<BigInt>()
                    .map_err(|_| SeriesError::BadCoefficient(s.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries { coeffs })
    }

    #[inline]
    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^exp`; zero beyond the truncation.
    pub fn coeff(&self, exp: usize) -> BigInt {
        self.coeffs.get(exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest exponent with a non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }

    /// Extends with zeros or drops high coefficients.
    pub fn retruncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigInt::zero());
        QSeries { coeffs }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    /// Cauchy product modulo `q^{N+1}`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Multiplicative inverse; the constant term must be a unit of `Z`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if !(c0.is_one() || (-c0).is_one()) {
            return Err(SeriesError::NonUnitConstantTerm(c0.clone()));
        }
        let n = self.trunc_order();
        let mut out = Self::zero(n);
        out.coeffs[0] = c0.clone();
        // b_i = -c0 * sum_{j=1..i} a_j b_{i-j}, using c0^{-1} = c0
        let support: Vec<usize> = (1..=n).filter(|&j| !self.coeffs[j].is_zero()).collect();
        for i in 1..=n {
            let mut acc = BigInt::zero();
            for &j in support.iter().take_while(|&&j| j <= i) {
                let b = &out.coeffs[i - j];
                if !b.is_zero() {
                    acc += &self.coeffs[j] * b;
                }
            }
            out.coeffs[i] = if c0.is_positive() { -acc } else { acc };
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = BigInt::from(c);
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * &c).collect(),
        }
    }

    /// Multiplies by `q^s`, discarding what falls past the truncation.
    pub fn shift(&self, s: usize) -> Self {
        let n = self.trunc_order();
        let mut out = Self::zero(n);
        if s <= n {
            out.coeffs[s..].clone_from_slice(&self.coeffs[..=n - s]);
        }
        out
    }

    /// Multiplies by the binomial `1 - c q^e`.
    pub fn mul_binomial(&self, c: i64, e: usize) -> Self {
        let mut out = self.clone();
        out.mul_binomial_in_place(c, e);
        out
    }

    pub(crate) fn mul_binomial_in_place(&mut self, c: i64, e: usize) {
        let n = self.trunc_order();
        if e > n {
            return;
        }
        let c = BigInt::from(c);
        if e == 0 {
            let f = BigInt::one() - c;
            for a in &mut self.coeffs {
                *a *= &f;
            }
            return;
        }
        for i in (e..=n).rev() {
            if !self.coeffs[i - e].is_zero() {
                let t = &self.coeffs[i - e] * &c;
                self.coeffs[i] -= t;
            }
        }
    }

    /// Divides by the binomial `1 - c q^e` with `e >= 1`.
    pub fn div_binomial(&self, c: i64, e: usize) -> Self {
        let mut out = self.clone();
        out.div_binomial_in_place(c, e);
        out
    }

    pub(crate) fn div_binomial_in_place(&mut self, c: i64, e: usize) {
        assert!(e >= 1, "1 - c is not a unit series");
        let n = self.trunc_order();
        let c = BigInt::from(c);
        for i in e..=n {
            if !self.coeffs[i - e].is_zero() {
                let t = &self.coeffs[i - e] * &c;
                self.coeffs[i] += t;
            }
        }
    }

    fn same_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.trunc_order() == other.trunc_order() {
            Ok(())
        } else {
            Err(mismatch_q(self.trunc_order(), other.trunc_order()))
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    /// Adds `c * q^s * other`; `other` may have any order, the result keeps
    /// the order of `self`.
    pub(crate) fn add_shifted_scaled(&mut self, other: &Self, s: usize, c: &BigInt) {
        let n = self.trunc_order();
        if s > n {
            return;
        }
        for (i, b) in other.coeffs.iter().enumerate().take(n - s + 1) {
            if !b.is_zero() {
                self.coeffs[i + s] += b * c;
            }
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        self.mul_to(other, self.trunc_order().min(other.trunc_order()))
    }

    /// Product computed only up to `q^order`, capped at both input orders.
    pub fn mul_to(&self, other: &Self, order: usize) -> Self {
        let n = order.min(self.trunc_order()).min(other.trunc_order());
        let mut out = Self::zero(n);
        let rhs: Vec<(usize, &BigInt)> = other
            .coeffs
            .iter()
            .enumerate()
            .take(n + 1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in rhs.iter().take_while(|(j, _)| i + j <= n) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }
}

impl fmt::Display for QSeries {
    /// Renders `1 + q - 2*q^3 + O(q^5)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}*q^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc_order() + 1)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as an array of decimal strings, index = exponent.
impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

/// Number of factors in a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorCount {
    Finite(usize),
    Infinite,
}

/// `prod_{j < count} (1 - sign * q^{base_exp + j * step_exp})`.
///
/// `(a; q)_n` with `a = q^s` is `sign = 1, base_exp = s, step_exp = 1`;
/// `(-q; q)_inf` is `sign = -1, base_exp = 1, step_exp = 1, Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PochhammerSpec {
    pub sign: i64,
    pub base_exp: usize,
    pub step_exp: usize,
    pub count: FactorCount,
}

impl PochhammerSpec {
    pub fn new(
        sign: i64,
        base_exp: usize,
        step_exp: usize,
        count: FactorCount,
    ) -> Result<Self, SeriesError> {
        let spec = PochhammerSpec {
            sign,
            base_exp,
            step_exp,
            count,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn finite(sign: i64, base_exp: usize, step_exp: usize, n: usize) -> Self {
        Self::new(sign, base_exp, step_exp, FactorCount::Finite(n)).expect("valid pochhammer")
    }

    pub fn infinite(sign: i64, base_exp: usize, step_exp: usize) -> Self {
        Self::new(sign, base_exp, step_exp, FactorCount::Infinite).expect("valid pochhammer")
    }

    fn validate(&self) -> Result<(), SeriesError> {
        if self.sign != 1 && self.sign != -1 {
            return Err(SeriesError::InvalidPochhammer("sign must be +1 or -1"));
        }
        if self.base_exp == 0 {
            return Err(SeriesError::InvalidPochhammer("base exponent must be >= 1"));
        }
        if self.step_exp == 0 {
            return Err(SeriesError::InvalidPochhammer("step exponent must be >= 1"));
        }
        Ok(())
    }

    /// Exponents of the factors that are not `1` modulo `q^{order+1}`.
    pub fn exponents(&self, order: usize) -> impl Iterator<Item = usize> + '_ {
        let limit = match self.count {
            FactorCount::Finite(n) => n,
            FactorCount::Infinite => usize::MAX,
        };
        (0..limit)
            .map(move |j| self.base_exp + j * self.step_exp)
            .take_while(move |&e| e <= order)
    }
}

pub fn pochhammer(spec: &PochhammerSpec, order: usize) -> QSeries {
    let mut out = QSeries::one(order);
    for e in spec.exponents(order) {
        out.mul_binomial_in_place(spec.sign, e);
    }
    out
}

/// `1 / pochhammer(spec)`, built factor by factor.
pub fn pochhammer_inverse(spec: &PochhammerSpec, order: usize) -> QSeries {
    let mut out = QSeries::one(order);
    for e in spec.exponents(order) {
        out.div_binomial_in_place(spec.sign, e);
    }
    out
}

/// Gaussian polynomial `[n choose k]_q`, zero when `k > n`.
pub fn gaussian_binomial(n: usize, k: usize, order: usize) -> QSeries {
    if k > n {
        return QSeries::zero(order);
    }
    let k = k.min(n - k);
    // prod_{i=1..k} (1 - q^{n-k+i}) / (1 - q^i); exact since the quotient is a polynomial
    let mut out = QSeries::one(order);
    for i in 1..=k {
        out.mul_binomial_in_place(1, n - k + i);
        out.div_binomial_in_place(1, i);
    }
    out
}

/// Bivariate series `sum_n x^n * a_n(q)`, truncated at `x^{x_trunc}` and
/// `q^{q_trunc}`.
#[derive(Clone, PartialEq, Eq)]
pub struct XQSeries {
    x_trunc: usize,
    q_trunc: usize,
    terms: BTreeMap<usize, QSeries>,
}

impl XQSeries {
    pub fn zero(x_trunc: usize, q_trunc: usize) -> Self {
        XQSeries {
            x_trunc,
            q_trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(x_trunc: usize, q_trunc: usize) -> Self {
        Self::from_slice(0, QSeries::one(q_trunc), x_trunc)
    }

    /// `x^n * slice`; the slice fixes `q_trunc`.
    pub fn from_slice(n: usize, slice: QSeries, x_trunc: usize) -> Self {
        let mut out = Self::zero(x_trunc, slice.trunc_order());
        out.set_slice(n, slice);
        out
    }

    /// `c * x^n * q^e`.
    pub fn monomial(c: i64, n: usize, e: usize, x_trunc: usize, q_trunc: usize) -> Self {
        Self::from_slice(n, QSeries::monomial(c, e, q_trunc), x_trunc)
    }

    pub fn x_trunc(&self) -> usize {
        self.x_trunc
    }

    pub fn q_trunc(&self) -> usize {
        self.q_trunc
    }

    /// Coefficient of `x^n`, as a series in `q`.
    pub fn slice(&self, n: usize) -> QSeries {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.q_trunc))
    }

    pub fn coeff(&self, n: usize, e: usize) -> BigInt {
        self.terms.get(&n).map(|s| s.coeff(e)).unwrap_or_default()
    }

    /// Stored (non-zero) slices in ascending `x`-degree.
    pub fn slices(&self) -> impl Iterator<Item = (usize, &QSeries)> {
        self.terms.iter().map(|(&n, s)| (n, s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn set_slice(&mut self, n: usize, slice: QSeries) {
        debug_assert_eq!(slice.trunc_order(), self.q_trunc);
        if n > self.x_trunc || slice.is_zero() {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, slice);
        }
    }

    /// Adds `x^n * slice` in place.
    pub(crate) fn add_to_slice(&mut self, n: usize, slice: &QSeries) {
        if n > self.x_trunc {
            return;
        }
        let q_trunc = self.q_trunc;
        let entry = self
            .terms
            .entry(n)
            .or_insert_with(|| QSeries::zero(q_trunc));
        entry.add_assign_unchecked(slice);
        if entry.is_zero() {
            self.terms.remove(&n);
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), SeriesError> {
        if self.x_trunc == other.x_trunc && self.q_trunc == other.q_trunc {
            Ok(())
        } else {
            Err(SeriesError::TruncationMismatch {
                left: (Some(self.x_trunc), self.q_trunc),
                right: (Some(other.x_trunc), other.q_trunc),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (&n, s) in &other.terms {
            out.add_to_slice(n, s);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for (&i, a) in &self.terms {
            for (&j, b) in other.terms.range(..=self.x_trunc - i) {
                out.add_to_slice(i + j, &a.mul_unchecked(b));
            }
        }
        Ok(out)
    }

    /// Inverse when the `x^0` slice has constant term `+1` or `-1`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let a0_inv = self.slice(0).inverse()?;
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        out.set_slice(0, a0_inv.clone());
        // b_n = -a0^{-1} * sum_{i=1..n} a_i b_{n-i}
        for n in 1..=self.x_trunc {
            let mut acc = QSeries::zero(self.q_trunc);
            for (&i, a) in self.terms.range(1..=n) {
                if let Some(b) = out.terms.get(&(n - i)) {
                    acc.add_assign_unchecked(&a.mul_unchecked(b));
                }
            }
            if !acc.is_zero() {
                out.set_slice(n, acc.mul_unchecked(&a0_inv).neg());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        XQSeries {
            x_trunc: self.x_trunc,
            q_trunc: self.q_trunc,
            terms: self.terms.iter().map(|(&n, s)| (n, s.neg())).collect(),
        }
    }

    /// Multiplies every slice by a series in `q` alone.
    pub fn mul_q(&self, factor: &QSeries) -> Result<Self, SeriesError> {
        if factor.trunc_order() != self.q_trunc {
            return Err(SeriesError::TruncationMismatch {
                left: (Some(self.x_trunc), self.q_trunc),
                right: (None, factor.trunc_order()),
            });
        }
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for (&n, s) in &self.terms {
            out.set_slice(n, s.mul_unchecked(factor));
        }
        Ok(out)
    }

    /// Multiplies by `1 - c x^d q^e`.
    pub fn mul_binomial(&self, c: i64, d: usize, e: usize) -> Self {
        if d == 0 {
            return self.map_slices(|s| s.mul_binomial(c, e));
        }
        let mut out = self.clone();
        let cb = BigInt::from(-c);
        for (&n, s) in &self.terms {
            if n + d <= self.x_trunc {
                let mut t = QSeries::zero(self.q_trunc);
                t.add_shifted_scaled(s, e, &cb);
                out.add_to_slice(n + d, &t);
            }
        }
        out
    }

    /// Divides by `1 - c x^d q^e`; needs `d + e >= 1`.
    pub fn div_binomial(&self, c: i64, d: usize, e: usize) -> Self {
        if d == 0 {
            return self.map_slices(|s| s.div_binomial(c, e));
        }
        // b_n = a_n + c q^e b_{n-d}
        let cb = BigInt::from(c);
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for n in 0..=self.x_trunc {
            let mut s = self.slice(n);
            if n >= d {
                if let Some(prev) = out.terms.get(&(n - d)) {
                    s.add_shifted_scaled(prev, e, &cb);
                }
            }
            out.set_slice(n, s);
        }
        out
    }

    fn map_slices(&self, f: impl Fn(&QSeries) -> QSeries) -> Self {
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for (&n, s) in &self.terms {
            out.set_slice(n, f(s));
        }
        out
    }

    /// Substitutes `x = q^t`. The result is exact to `q_trunc` whenever every
    /// `x^n` slice is `O(q^n)` or `t >= 1` and `x_trunc >= q_trunc`.
    pub fn substitute_x(&self, t: usize) -> QSeries {
        let mut out = QSeries::zero(self.q_trunc);
        let one = BigInt::one();
        for (&n, s) in &self.terms {
            out.add_shifted_scaled(s, n * t, &one);
        }
        out
    }

    /// Multiplies by `x^d`.
    pub fn shift_x(&self, d: usize) -> Self {
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for (&n, s) in self.terms.range(..=self.x_trunc.saturating_sub(d)) {
            if n + d <= self.x_trunc {
                out.set_slice(n + d, s.clone());
            }
        }
        out
    }

    /// Adds `c * x^n * q^e * slice`; `slice` may have any order.
    pub(crate) fn add_shifted_to_slice(&mut self, n: usize, slice: &QSeries, e: usize, c: &BigInt) {
        if n > self.x_trunc || e > self.q_trunc {
            return;
        }
        let q_trunc = self.q_trunc;
        let entry = self
            .terms
            .entry(n)
            .or_insert_with(|| QSeries::zero(q_trunc));
        entry.add_shifted_scaled(slice, e, c);
        if entry.is_zero() {
            self.terms.remove(&n);
        }
    }

    /// Replaces `x^n` by `x^n q^{d n (n-1) / 2}`.
    pub fn staircase(&self, d: usize) -> Self {
        let mut out = Self::zero(self.x_trunc, self.q_trunc);
        for (&n, s) in &self.terms {
            out.set_slice(n, s.shift(d * n * n.saturating_sub(1) / 2));
        }
        out
    }
}

impl fmt::Debug for XQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XQSeries(x<={}, q<={})", self.x_trunc, self.q_trunc)?;
        for (n, s) in &self.terms {
            write!(f, "\n  x^{n}: {s}")?;
        }
        Ok(())
    }
}

/// `prod_{j < count} (1 - sign * x^{x_deg} q^{base_exp + j * step_exp})`.
pub fn xq_pochhammer(
    spec: &PochhammerSpec,
    x_deg: usize,
    x_trunc: usize,
    q_trunc: usize,
) -> XQSeries {
    let mut out = XQSeries::one(x_trunc, q_trunc);
    for e in spec.exponents(q_trunc) {
        out = out.mul_binomial(spec.sign, x_deg, e);
    }
    out
}

pub fn xq_pochhammer_inverse(
    spec: &PochhammerSpec,
    x_deg: usize,
    x_trunc: usize,
    q_trunc: usize,
) -> XQSeries {
    let mut out = XQSeries::one(x_trunc, q_trunc);
    for e in spec.exponents(q_trunc) {
        out = out.div_binomial(spec.sign, x_deg, e);
    }
    out
}

/// `(-x q^s; q)_inf` through its expansion `sum_j x^j q^{s j + j(j-1)/2} / (q; q)_j`.
/// Agrees with `xq_pochhammer` but costs one univariate inverse per slice.
pub fn euler_tail(s: usize, x_trunc: usize, q_trunc: usize) -> XQSeries {
    assert!(s >= 1);
    let mut out = XQSeries::zero(x_trunc, q_trunc);
    let mut inv = QSeries::one(q_trunc);
    let one = BigInt::one();
    for j in 0..=x_trunc {
        if j > 0 {
            inv.div_binomial_in_place(1, j);
        }
        let e = s * j + j * j.saturating_sub(1) / 2;
        if e > q_trunc {
            break;
        }
        out.add_shifted_to_slice(j, &inv, e, &one);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(c: &[i64], n: usize) -> QSeries {
        QSeries::from_coeffs(c.iter().copied(), n)
    }

    fn ints(s: &QSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    // partitions of n into parts drawn from `allowed`, each part at most `max_mult` times
    fn count_parts(n: usize, allowed: &[usize], max_mult: usize) -> i64 {
        fn go(n: usize, allowed: &[usize], max_mult: usize) -> i64 {
            match allowed.split_first() {
                None => i64::from(n == 0),
                Some((&p, rest)) => (0..=max_mult)
                    .take_while(|m| m * p <= n)
                    .map(|m| go(n - m * p, rest, max_mult))
                    .sum(),
            }
        }
        go(n, allowed, max_mult)
    }

    #[test]
    fn add_examples() {
        let n = 5;
        assert_eq!(
            qs(&[1, 1], n).checked_add(&qs(&[1, -1], n)).unwrap(),
            qs(&[2], n)
        );
        let s = qs(&[3, 0, -7, 2], n);
        assert_eq!(s.checked_add(&QSeries::zero(n)).unwrap(), s);
        assert_eq!(
            qs(&[1, -1, -1, 1], n)
                .checked_add(&qs(&[0, 1, 1], n))
                .unwrap(),
            qs(&[1, 0, 0, 1], n)
        );
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let err = QSeries::one(3).checked_add(&QSeries::one(4)).unwrap_err();
        assert!(matches!(err, SeriesError::TruncationMismatch { .. }));
        assert!(QSeries::one(3).checked_mul(&QSeries::one(4)).is_err());
        let a = XQSeries::one(2, 3);
        assert!(a.checked_mul(&XQSeries::one(3, 3)).is_err());
    }

    #[test]
    fn mul_examples() {
        let n = 8;
        let geo = qs(&[1; 9], n);
        assert_eq!(qs(&[1, -1], n).checked_mul(&geo).unwrap(), QSeries::one(n));
        let s = qs(&[4, -1, 0, 9], n);
        assert_eq!(s.checked_mul(&QSeries::one(n)).unwrap(), s);
        assert_eq!(
            qs(&[1, -1], n).checked_mul(&qs(&[1, 0, -1], n)).unwrap(),
            qs(&[1, -1, -1, 1], n)
        );
    }

    #[test]
    fn inverse_examples() {
        let n = 6;
        assert_eq!(qs(&[1, -1], n).inverse().unwrap(), qs(&[1; 7], n));
        assert_eq!(QSeries::one(n).inverse().unwrap(), QSeries::one(n));
        let q2 = pochhammer(&PochhammerSpec::finite(1, 1, 1, 2), 4);
        let expected: Vec<i64> = (0..=4)
            .map(|m| count_parts(m, &[1, 2], usize::MAX))
            .collect();
        assert_eq!(expected, vec![1, 1, 2, 2, 3]);
        assert_eq!(ints(&q2.inverse().unwrap()), expected);
        let err = qs(&[2, 1], n).inverse().unwrap_err();
        assert!(matches!(err, SeriesError::NonUnitConstantTerm(_)));
        let neg = qs(&[-1, 3, 0, 2], n);
        assert_eq!(
            neg.checked_mul(&neg.inverse().unwrap()).unwrap(),
            QSeries::one(n)
        );
    }

    #[test]
    fn pochhammer_examples() {
        let n = 10;
        let distinct = pochhammer(&PochhammerSpec::infinite(-1, 1, 1), n);
        let oracle: Vec<i64> = (0..=n)
            .map(|m| count_parts(m, &(1..=n).collect::<Vec<_>>(), 1))
            .collect();
        assert_eq!(oracle, vec![1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 10]);
        assert_eq!(ints(&distinct), oracle);

        assert_eq!(
            pochhammer(&PochhammerSpec::finite(1, 1, 1, 0), n),
            QSeries::one(n)
        );

        let rr = pochhammer(&PochhammerSpec::infinite(1, 1, 5), n)
            .checked_mul(&pochhammer(&PochhammerSpec::infinite(1, 4, 5), n))
            .unwrap()
            .inverse()
            .unwrap();
        let allowed: Vec<usize> = (1..=n).filter(|p| p % 5 == 1 || p % 5 == 4).collect();
        let oracle: Vec<i64> = (0..=n)
            .map(|m| count_parts(m, &allowed, usize::MAX))
            .collect();
        assert_eq!(oracle, vec![1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6]);
        assert_eq!(ints(&rr), oracle);
        assert_eq!(
            pochhammer_inverse(&PochhammerSpec::infinite(1, 1, 5), n)
                .checked_mul(&pochhammer_inverse(&PochhammerSpec::infinite(1, 4, 5), n))
                .unwrap(),
            rr
        );
    }

    #[test]
    fn pochhammer_rejects_bad_specs() {
        assert!(PochhammerSpec::new(2, 1, 1, FactorCount::Infinite).is_err());
        assert!(PochhammerSpec::new(1, 0, 1, FactorCount::Infinite).is_err());
        assert!(PochhammerSpec::new(1, 1, 0, FactorCount::Finite(3)).is_err());
    }

    // q-Pascal: [n,k] = [n-1,k-1] + q^k [n-1,k]
    fn pascal(n: usize, k: usize, order: usize) -> QSeries {
        if k > n {
            return QSeries::zero(order);
        }
        if k == 0 || k == n {
            return QSeries::one(order);
        }
        pascal(n - 1, k - 1, order)
            .checked_add(&pascal(n - 1, k, order).shift(k))
            .unwrap()
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(ints(&gaussian_binomial(3, 1, 5)), vec![1, 1, 1, 0, 0, 0]);
        assert_eq!(gaussian_binomial(7, 0, 5), QSeries::one(5));
        assert_eq!(ints(&gaussian_binomial(4, 2, 5)), vec![1, 1, 2, 1, 1, 0]);
        assert!(gaussian_binomial(2, 3, 5).is_zero());
        for n in 0..9 {
            for k in 0..=n {
                assert_eq!(gaussian_binomial(n, k, 25), pascal(n, k, 25), "[{n},{k}]");
            }
        }
    }

    #[test]
    fn display_and_json() {
        let s = qs(&[1, -1, 0, 2], 4);
        assert_eq!(s.to_string(), "1 - q + 2*q^3 + O(q^5)");
        assert_eq!(QSeries::zero(2).to_string(), "0 + O(q^3)");
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"["1","-1","0","2","0"]"#
        );
        assert_eq!(
            QSeries::from_decimal_strings(&s.to_decimal_strings()).unwrap(),
            s
        );
    }

    #[test]
    fn bivariate_examples() {
        let (nx, nq) = (4, 6);
        let a = XQSeries::one(nx, nq).mul_binomial(-1, 1, 1);
        let b = XQSeries::one(nx, nq).mul_binomial(-1, 1, 2);
        let prod = a.checked_mul(&b).unwrap();
        let expected = XQSeries::one(nx, nq)
            .checked_add(&XQSeries::from_slice(1, qs(&[0, 1, 1], nq), nx))
            .unwrap()
            .checked_add(&XQSeries::monomial(1, 2, 3, nx, nq))
            .unwrap();
        assert_eq!(prod, expected);
        assert_eq!(
            xq_pochhammer(&PochhammerSpec::finite(-1, 1, 1, 2), 1, nx, nq),
            expected
        );
        assert_eq!(prod.checked_mul(&XQSeries::one(nx, nq)).unwrap(), prod);
        assert_eq!(
            xq_pochhammer(&PochhammerSpec::finite(-1, 1, 1, 0), 1, nx, nq),
            XQSeries::one(nx, nq)
        );
    }

    #[test]
    fn bivariate_distinct_parts_marginal() {
        let n = 10;
        let full = xq_pochhammer(&PochhammerSpec::infinite(-1, 1, 1), 1, n, n);
        // brute-force table by (length, weight)
        let mut table = vec![vec![0i64; n + 1]; n + 1];
        for mask in 0u32..(1 << n) {
            let parts: Vec<usize> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect();
            let w: usize = parts.iter().sum();
            if w <= n {
                table[parts.len()][w] += 1;
            }
        }
        for (len, row) in table.iter().enumerate() {
            assert_eq!(ints(&full.slice(len)), *row, "x^{len}");
        }
        assert_eq!(
            ints(&full.substitute_x(0)),
            vec![1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 10]
        );
    }

    #[test]
    fn euler_slices() {
        // x^n slice of (-xq; q)_inf is q^{n(n+1)/2} / (q; q)_n
        let n = 14;
        let full = xq_pochhammer(&PochhammerSpec::infinite(-1, 1, 1), 1, n, n);
        for len in 0..=n {
            let expected = pochhammer_inverse(&PochhammerSpec::finite(1, 1, 1, len), n)
                .shift(len * (len + 1) / 2);
            assert_eq!(full.slice(len), expected);
        }
    }

    #[test]
    fn euler_tail_matches_product() {
        for s in 1..5 {
            assert_eq!(
                euler_tail(s, 9, 16),
                xq_pochhammer(&PochhammerSpec::infinite(-1, s, 1), 1, 9, 16),
                "s={s}"
            );
        }
        let a = XQSeries::monomial(3, 1, 2, 4, 6);
        assert_eq!(a.shift_x(2), XQSeries::monomial(3, 3, 2, 4, 6));
        assert!(a.shift_x(4).is_zero());
    }

    #[test]
    fn substitute_and_staircase() {
        let a = XQSeries::one(3, 5).mul_binomial(-1, 1, 1);
        assert_eq!(ints(&a.substitute_x(0)), vec![1, 1, 0, 0, 0, 0]);
        let m = XQSeries::monomial(1, 2, 3, 3, 6);
        assert_eq!(m.substitute_x(1), QSeries::monomial(1, 5, 6));
        assert_eq!(a.staircase(0), a);
        assert_eq!(
            XQSeries::monomial(1, 2, 0, 3, 8).staircase(1),
            XQSeries::monomial(1, 2, 1, 3, 8)
        );
        assert_eq!(
            XQSeries::monomial(1, 3, 1, 3, 8).staircase(2),
            XQSeries::monomial(1, 3, 7, 3, 8)
        );
        // pushed past the truncation
        assert!(XQSeries::monomial(1, 3, 1, 3, 6).staircase(2).is_zero());
    }

    #[test]
    fn bivariate_inverse_and_division_agree() {
        let (nx, nq) = (8, 12);
        let spec = PochhammerSpec::finite(-1, 1, 1, 5);
        let p = xq_pochhammer(&spec, 1, nx, nq);
        let via_inverse = p.inverse().unwrap();
        assert_eq!(via_inverse, xq_pochhammer_inverse(&spec, 1, nx, nq));
        assert_eq!(p.checked_mul(&via_inverse).unwrap(), XQSeries::one(nx, nq));
    }
}
