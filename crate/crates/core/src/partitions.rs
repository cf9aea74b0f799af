//! Partitions into distinct parts: enumeration, runs, raft designations and
//! the brute-force generating-function oracle.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::series::XQSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts must be positive, found 0")]
    ZeroPart,
    #[error("parts must be strictly increasing: {0} then {1}")]
    NotStrictlyIncreasing(u32, u32),
    #[error("even partition part {0} is odd")]
    OddPart(u32),
    #[error("even partition parts must be non-increasing: {0} then {1}")]
    NotNonIncreasing(u32, u32),
}

/// Strictly increasing positive parts `l_1 < l_2 < ... < l_len`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

/// A maximal block of consecutive parts `start ..= start + length - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub start: u32,
    pub length: u32,
}

impl Run {
    pub fn end(&self) -> u32 {
        self.start + self.length - 1
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.first() == Some(&0) {
            return Err(PartitionError::ZeroPart);
        }
        if let Some(w) = parts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(PartitionError::NotStrictlyIncreasing(w[0], w[1]));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(Partition::new(parts.clone()).is_ok());
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, part: u32) -> bool {
        self.parts.binary_search(&part).is_ok()
    }

    pub fn runs(&self) -> Vec<Run> {
        runs_of(&self.parts)
    }

    /// Bottoms `k` of the rafts `[k, k+1]` that may be designated, one per
    /// run of length at least two.
    pub fn eligible_rafts(&self) -> Vec<u32> {
        eligible_rafts_of(&self.parts)
    }

    pub fn is_d_distinct(&self, d: u32) -> bool {
        is_d_distinct(&self.parts, d)
    }

    pub fn has_k_sequence(&self, k: u32) -> bool {
        has_k_sequence(&self.parts, k)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        let text: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "{}", text.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

pub fn runs_of(parts: &[u32]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    for &p in parts {
        match runs.last_mut() {
            Some(r) if r.end() + 1 == p => r.length += 1,
            _ => runs.push(Run {
                start: p,
                length: 1,
            }),
        }
    }
    runs
}

pub fn eligible_rafts_of(parts: &[u32]) -> Vec<u32> {
    runs_of(parts)
        .into_iter()
        .filter(|r| r.length >= 2)
        .map(|r| r.end() - 1)
        .collect()
}

/// Number of runs of length at least two, i.e. the largest possible number
/// of designated rafts.
pub fn count_eligible_rafts(parts: &[u32]) -> usize {
    let mut count = 0;
    let mut run_len = 0;
    for (i, &p) in parts.iter().enumerate() {
        if i > 0 && parts[i - 1] + 1 == p {
            run_len += 1;
        } else {
            run_len = 1;
        }
        if run_len == 2 {
            count += 1;
        }
    }
    count
}

pub fn is_d_distinct(parts: &[u32], d: u32) -> bool {
    parts.windows(2).all(|w| w[1] - w[0] >= d)
}

pub fn has_k_sequence(parts: &[u32], k: u32) -> bool {
    let mut run_len = 0;
    for (i, &p) in parts.iter().enumerate() {
        if i > 0 && parts[i - 1] + 1 == p {
            run_len += 1;
        } else {
            run_len = 1;
        }
        if run_len >= k {
            return true;
        }
    }
    false
}

/// Non-increasing even parts, zeros allowed, of a fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvenPartition {
    parts: Vec<u32>,
}

impl EvenPartition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if let Some(&p) = parts.iter().find(|&&p| p % 2 != 0) {
            return Err(PartitionError::OddPart(p));
        }
        if let Some(w) = parts.windows(2).find(|w| w[0] < w[1]) {
            return Err(PartitionError::NotNonIncreasing(w[0], w[1]));
        }
        Ok(EvenPartition { parts })
    }

    pub fn zeros(len: usize) -> Self {
        EvenPartition {
            parts: vec![0; len],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }
}

impl fmt::Display for EvenPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", text.join(","))
    }
}

/// Calls `visit` on the parts of every distinct-part partition of weight
/// `<= max_weight` whose parts are all `>= min_part`. The order is a
/// depth-first walk; use [`enumerate_distinct`] for the canonical order.
pub fn for_each_distinct_from<F>(min_part: u32, max_weight: u64, mut visit: F)
where
    F: FnMut(&[u32]),
{
    fn walk<F: FnMut(&[u32])>(stack: &mut Vec<u32>, next: u32, room: u64, visit: &mut F) {
        visit(stack);
        let mut p = next;
        while u64::from(p) <= room {
            stack.push(p);
            walk(stack, p + 1, room - u64::from(p), visit);
            stack.pop();
            p += 1;
        }
    }
    let mut stack = Vec::new();
    walk(&mut stack, min_part.max(1), max_weight, &mut visit);
}

pub fn for_each_distinct<F: FnMut(&[u32])>(max_weight: u64, visit: F) {
    for_each_distinct_from(1, max_weight, visit)
}

/// Distinct-part partitions of exactly `weight`, in lexicographic order.
pub fn distinct_of_weight(weight: u64) -> Vec<Partition> {
    fn walk(stack: &mut Vec<u32>, next: u32, room: u64, out: &mut Vec<Partition>) {
        if room == 0 {
            out.push(Partition::from_sorted_unchecked(stack.clone()));
            return;
        }
        let mut p = next;
        while u64::from(p) <= room {
            let rest = room - u64::from(p);
            // the remaining parts exceed p, so either nothing remains or it is > p
            if rest == 0 || rest > u64::from(p) {
                stack.push(p);
                walk(stack, p + 1, rest, out);
                stack.pop();
            }
            p += 1;
        }
    }
    let mut out = Vec::new();
    walk(&mut Vec::new(), 1, weight, &mut out);
    out
}

/// Every distinct-part partition of weight `<= max_weight`, ordered by
/// weight and then lexicographically.
pub fn enumerate_distinct(max_weight: u64) -> Vec<Partition> {
    (0..=max_weight).flat_map(distinct_of_weight).collect()
}

/// All subsets of the eligible rafts, as sorted raft bottoms. Subset `i`
/// contains the `j`-th eligible raft iff bit `j` of `i` is set.
pub fn enumerate_designations(p: &Partition) -> Vec<Vec<u32>> {
    let eligible = p.eligible_rafts();
    (0u64..1 << eligible.len())
        .map(|mask| {
            eligible
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, &k)| k)
                .collect()
        })
        .collect()
}

/// `sum over designations of (-1)^{#rafts}`: `1` with no eligible raft,
/// else `0`.
pub fn signed_designation_sum(p: &Partition) -> i64 {
    enumerate_designations(p)
        .iter()
        .map(|d| if d.len() % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// One contribution `coeff * x^x_deg * q^q_exp` to an oracle series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleTerm {
    pub x_deg: usize,
    pub q_exp: usize,
    pub coeff: i64,
}

impl OracleTerm {
    /// `x^{len} q^{weight}`: the standard counting weight.
    pub fn counting(parts: &[u32]) -> Self {
        OracleTerm {
            x_deg: parts.len(),
            q_exp: parts.iter().map(|&p| p as usize).sum(),
            coeff: 1,
        }
    }
}

/// Sums `weight(p)` over all distinct-part partitions `p` of weight
/// `<= q_trunc` that satisfy `pred`.
pub fn oracle_gf<P, W>(pred: P, weight: W, x_trunc: usize, q_trunc: usize) -> XQSeries
where
    P: Fn(&[u32]) -> bool,
    W: Fn(&[u32]) -> OracleTerm,
{
    let mut table = vec![vec![0i64; q_trunc + 1]; x_trunc + 1];
    for_each_distinct(q_trunc as u64, |parts| {
        if pred(parts) {
            let t = weight(parts);
            if t.x_deg <= x_trunc && t.q_exp <= q_trunc {
                table[t.x_deg][t.q_exp] += t.coeff;
            }
        }
    });
    table_to_series(table, x_trunc, q_trunc)
}

pub(crate) fn table_to_series(table: Vec<Vec<i64>>, x_trunc: usize, q_trunc: usize) -> XQSeries {
    let mut out = XQSeries::zero(x_trunc, q_trunc);
    for (n, row) in table.into_iter().enumerate() {
        if row.iter().any(|&c| c != 0) {
            let slice =
                crate::series::QSeries::from_coeffs(row.into_iter().map(BigInt::from), q_trunc);
            out.add_to_slice(n, &slice);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn counts_by_weight(max: u64, pred: impl Fn(&Partition) -> bool) -> Vec<usize> {
        let mut counts = vec![0; max as usize + 1];
        for q in enumerate_distinct(max) {
            if pred(&q) {
                counts[q.weight() as usize] += 1;
            }
        }
        counts
    }

    #[test]
    fn construction_checks() {
        assert_eq!(Partition::new(vec![0, 1]), Err(PartitionError::ZeroPart));
        assert_eq!(
            Partition::new(vec![1, 3, 3]),
            Err(PartitionError::NotStrictlyIncreasing(3, 3))
        );
        let x = p(&[1, 3, 6]);
        assert_eq!((x.weight(), x.len()), (10, 3));
        assert_eq!(x.to_string(), "1,3,6");
        assert_eq!(Partition::empty().to_string(), "()");
        assert!(EvenPartition::new(vec![4, 2, 2, 0]).is_ok());
        assert_eq!(
            EvenPartition::new(vec![2, 3]),
            Err(PartitionError::OddPart(3))
        );
        assert_eq!(
            EvenPartition::new(vec![2, 4]),
            Err(PartitionError::NotNonIncreasing(2, 4))
        );
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_distinct(0), vec![Partition::empty()]);
        assert_eq!(counts_by_weight(5, |_| true), vec![1, 1, 1, 2, 2, 3]);
        assert_eq!(distinct_of_weight(10).len(), 10);
        assert_eq!(distinct_of_weight(5), vec![p(&[1, 4]), p(&[2, 3]), p(&[5])]);
        let all = enumerate_distinct(12);
        assert!(all
            .windows(2)
            .all(|w| (w[0].weight(), &w[0]) < (w[1].weight(), &w[1])));
        let mut visited = 0;
        for_each_distinct(12, |_| visited += 1);
        assert_eq!(visited, all.len());
    }

    #[test]
    fn run_examples() {
        let runs = p(&[1, 2, 3, 5, 7, 8, 9]).runs();
        assert_eq!(
            runs,
            vec![
                Run {
                    start: 1,
                    length: 3
                },
                Run {
                    start: 5,
                    length: 1
                },
                Run {
                    start: 7,
                    length: 3
                }
            ]
        );
        assert!(Partition::empty().runs().is_empty());
        assert_eq!(p(&[2, 4, 6]).runs().len(), 3);
    }

    #[test]
    fn designation_examples() {
        assert_eq!(
            enumerate_designations(&p(&[1, 2, 3, 5, 7, 8, 9])),
            vec![vec![], vec![2], vec![8], vec![2, 8]]
        );
        assert_eq!(
            enumerate_designations(&p(&[1, 3, 5])),
            vec![Vec::<u32>::new()]
        );
        assert_eq!(
            enumerate_designations(&p(&[1, 2, 3, 4])),
            vec![vec![], vec![3]]
        );
        assert_eq!(
            enumerate_designations(&Partition::empty()),
            vec![Vec::<u32>::new()]
        );
        assert_eq!(signed_designation_sum(&p(&[1, 2, 3, 4])), 0);
        assert_eq!(signed_designation_sum(&p(&[1, 3, 5])), 1);
    }

    #[test]
    fn distinctness_examples() {
        assert!(p(&[1, 3, 6]).is_d_distinct(2));
        assert!(!p(&[1, 2]).is_d_distinct(2));
        let two: Vec<Partition> = distinct_of_weight(10)
            .into_iter()
            .filter(|q| q.is_d_distinct(2))
            .collect();
        assert_eq!(
            two,
            vec![
                p(&[1, 3, 6]),
                p(&[1, 9]),
                p(&[2, 8]),
                p(&[3, 7]),
                p(&[4, 6]),
                p(&[10])
            ]
        );
        assert!(p(&[1, 2, 3]).has_k_sequence(3));
        assert!(!p(&[1, 2, 4, 5]).has_k_sequence(3));
        for q in enumerate_distinct(20) {
            assert_eq!(q.is_d_distinct(2), !q.has_k_sequence(2), "{q}");
        }
    }

    #[test]
    fn runs_cover_parts_and_count_rafts() {
        for q in enumerate_distinct(22) {
            let runs = q.runs();
            let flat: Vec<u32> = runs.iter().flat_map(|r| r.start..=r.end()).collect();
            assert_eq!(flat, q.parts());
            for w in runs.windows(2) {
                assert!(w[0].end() + 1 < w[1].start);
            }
            let long = runs.iter().filter(|r| r.length >= 2).count();
            assert_eq!(q.eligible_rafts().len(), long);
            assert_eq!(count_eligible_rafts(q.parts()), long);
            let expected = i64::from(long == 0);
            assert_eq!(signed_designation_sum(&q), expected, "{q}");
        }
    }

    #[test]
    fn oracle_examples() {
        let n = 12;
        let all = oracle_gf(|_| true, OracleTerm::counting, n, n);
        let distinct =
            crate::series::pochhammer(&crate::series::PochhammerSpec::infinite(-1, 1, 1), n);
        assert_eq!(all.substitute_x(0), distinct);
        let two = oracle_gf(|q| is_d_distinct(q, 2), OracleTerm::counting, n, n);
        assert_eq!(two.substitute_x(0).coeff(10), BigInt::from(6));
        assert!(oracle_gf(|_| false, OracleTerm::counting, n, n).is_zero());
    }
}
