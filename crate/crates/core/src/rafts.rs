//! Designated rafts on partitions into distinct parts, the weight-two moves
//! that carry them, and the bijection between rafted partitions and pairs
//! (minimal rafted partition, even partition).
//!
//! A raft `[k, k+1]` is the top pair of a run, so `k + 2` is never a part.
//! Rafts are addressed by rank (0 = smallest) because a move relabels the
//! parts a raft sits on, and no move ever lets one raft overtake another.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::partitions::{
    enumerate_designations, enumerate_distinct, for_each_distinct_from, EvenPartition, Partition,
    PartitionError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaftError {
    #[error("raft at {0} is not a pair of parts")]
    RaftPairBroken(u32),
    #[error("raft at {0} is not at the top of its run")]
    RaftNotTerminal(u32),
    #[error("rafts at {0} and {1} share a run")]
    CollidingRafts(u32, u32),
    #[error("no raft of rank {rank}; there are {count}")]
    NoSuchRaft { rank: usize, count: usize },
    #[error("raft at {raft} is blocked by the designated raft at {by}")]
    Blocked { raft: u32, by: u32 },
    #[error("raft at {raft} cannot move below part 1")]
    AtBoundary { raft: u32 },
    #[error("moving raft at {raft} back would join the designated raft at {with}")]
    WouldCollide { raft: u32, with: u32 },
    #[error("partition is not minimal")]
    NotMinimal,
    #[error("invalid even partition: {0}")]
    InvalidEta(String),
    #[error("invalid minimal profile: {0}")]
    InvalidProfile(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A partition into distinct parts with an admissible set of designated
/// rafts, stored as their bottom parts in increasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaftedPartition {
    partition: Partition,
    rafts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One applied move, for traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub before: RaftedPartition,
    pub after: RaftedPartition,
    pub rank: usize,
    pub direction: Direction,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.direction {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        };
        write!(
            f,
            "{}  --{}(raft={})-->  {}",
            self.before,
            tag,
            self.rank + 1,
            self.after
        )
    }
}

impl RaftedPartition {
    pub fn new<I>(partition: Partition, rafts: I) -> Result<Self, RaftError>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut rafts: Vec<u32> = rafts.into_iter().collect();
        rafts.sort_unstable();
        rafts.dedup();
        for &k in &rafts {
            if !partition.contains(k) || !partition.contains(k + 1) {
                return Err(RaftError::RaftPairBroken(k));
            }
        }
        let runs = partition.runs();
        let run_of = |k: u32| runs.iter().position(|r| r.start <= k && k <= r.end());
        for w in rafts.windows(2) {
            if run_of(w[0]) == run_of(w[1]) {
                return Err(RaftError::CollidingRafts(w[0], w[1]));
            }
        }
        if let Some(&k) = rafts.iter().find(|&&k| partition.contains(k + 2)) {
            return Err(RaftError::RaftNotTerminal(k));
        }
        Ok(RaftedPartition { partition, rafts })
    }

    pub fn undesignated(partition: Partition) -> Self {
        RaftedPartition {
            partition,
            rafts: Vec::new(),
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn parts(&self) -> &[u32] {
        self.partition.parts()
    }

    /// Bottoms of the designated rafts, increasing.
    pub fn rafts(&self) -> &[u32] {
        &self.rafts
    }

    pub fn raft_count(&self) -> usize {
        self.rafts.len()
    }

    pub fn weight(&self) -> u64 {
        self.partition.weight()
    }

    fn has(&self, part: u32) -> bool {
        self.partition.contains(part)
    }

    fn raft_at(&self, rank: usize) -> Result<u32, RaftError> {
        self.rafts.get(rank).copied().ok_or(RaftError::NoSuchRaft {
            rank,
            count: self.rafts.len(),
        })
    }

    /// Removes part `old`, inserts part `new`, and re-seats raft `rank` at `dest`.
    fn relocate(&self, rank: usize, old: u32, new: u32, dest: u32) -> Self {
        let mut parts: Vec<u32> = self.parts().iter().copied().filter(|&p| p != old).collect();
        let at = parts.partition_point(|&p| p < new);
        parts.insert(at, new);
        let mut rafts = self.rafts.clone();
        rafts[rank] = dest;
        let out = RaftedPartition {
            partition: Partition::from_sorted_unchecked(parts),
            rafts,
        };
        debug_assert!(
            RaftedPartition::new(out.partition.clone(), out.rafts.clone()).is_ok(),
            "{self} -> {out}"
        );
        out
    }

    /// Moves raft `rank` forward, adding two to the weight.
    ///
    /// With `k + 3` absent the raft steps to `[k+1, k+2]`. Otherwise the run
    /// `k+3 ..= t` is absorbed: the parts become `k+1 ..= t` and the raft
    /// lands on `[t-1, t]`. Refused when `[t-1, t]` is itself designated.
    pub fn forward_move(&self, rank: usize) -> Result<Self, RaftError> {
        let k = self.raft_at(rank)?;
        let dest = if self.has(k + 3) {
            let mut top = k + 3;
            while self.has(top + 1) {
                top += 1;
            }
            if top > k + 3 && self.rafts.binary_search(&(top - 1)).is_ok() {
                return Err(RaftError::Blocked {
                    raft: k,
                    by: top - 1,
                });
            }
            top - 1
        } else {
            k + 1
        };
        Ok(self.relocate(rank, k, k + 2, dest))
    }

    /// Inverse of [`forward_move`](Self::forward_move), subtracting two from
    /// the weight.
    pub fn backward_move(&self, rank: usize) -> Result<Self, RaftError> {
        let k = self.raft_at(rank)?;
        let (old, new, dest) = if !self.has(k - 1) || k == 1 {
            if k == 1 {
                return Err(RaftError::AtBoundary { raft: k });
            }
            (k + 1, k - 1, k - 1)
        } else {
            let mut start = k - 1;
            while start > 1 && self.has(start - 1) {
                start -= 1;
            }
            if start == 1 {
                return Err(RaftError::AtBoundary { raft: k });
            }
            (start + 1, start - 1, start - 1)
        };
        if dest >= 3 && self.rafts.binary_search(&(dest - 2)).is_ok() {
            return Err(RaftError::WouldCollide {
                raft: k,
                with: dest - 2,
            });
        }
        Ok(self.relocate(rank, old, new, dest))
    }

    /// No designated raft admits a backward move.
    pub fn is_minimal(&self) -> bool {
        (0..self.rafts.len()).all(|r| self.backward_move(r).is_err())
    }

    /// Minimality read off the shape: the run under the smallest raft starts
    /// at 1 and the run under each later raft starts three above the
    /// previous raft.
    pub fn is_minimal_structural(&self) -> bool {
        let runs = self.partition.runs();
        let mut floor = 1;
        for &k in &self.rafts {
            let run = runs
                .iter()
                .find(|r| r.start <= k && k <= r.end())
                .expect("raft lies in a run");
            if run.start != floor {
                return false;
            }
            floor = k + 3;
        }
        true
    }

    /// Backward moves to exhaustion, smallest raft first. Returns the
    /// minimal partition, the even partition (largest raft first) and the
    /// moves performed.
    pub fn decompose_traced(&self) -> (RaftedPartition, EvenPartition, Vec<Move>) {
        let k = self.rafts.len();
        let mut current = self.clone();
        let mut moves = Vec::new();
        let mut eta = vec![0u32; k];
        for rank in 0..k {
            while let Ok(next) = current.backward_move(rank) {
                moves.push(Move {
                    before: current,
                    after: next.clone(),
                    rank,
                    direction: Direction::Backward,
                });
                current = next;
                eta[k - 1 - rank] += 2;
            }
        }
        let eta = EvenPartition::new(eta).expect("backward counts are non-increasing");
        (current, eta, moves)
    }

    pub fn decompose(&self) -> (RaftedPartition, EvenPartition) {
        let (beta, eta, _) = self.decompose_traced();
        (beta, eta)
    }

    pub fn minimal_profile(&self) -> Result<MinimalProfile, RaftError> {
        if self.rafts.is_empty() || !self.is_minimal() {
            return Err(RaftError::NotMinimal);
        }
        let top = *self.rafts.last().expect("non-empty");
        let tail = self
            .parts()
            .iter()
            .copied()
            .filter(|&p| p >= top + 3)
            .collect();
        MinimalProfile::new(self.rafts.clone(), tail)
    }
}

/// Moves the largest raft of `beta` forward `eta[0] / 2` times, the next
/// largest `eta[1] / 2` times, and so on.
pub fn compose_traced(
    beta: &RaftedPartition,
    eta: &EvenPartition,
) -> Result<(RaftedPartition, Vec<Move>), RaftError> {
    let k = beta.raft_count();
    if eta.len() != k {
        return Err(RaftError::InvalidEta(format!(
            "expected {k} parts, found {}",
            eta.len()
        )));
    }
    if !beta.is_minimal() {
        return Err(RaftError::NotMinimal);
    }
    let mut current = beta.clone();
    let mut moves = Vec::new();
    for (i, &e) in eta.parts().iter().enumerate() {
        let rank = k - 1 - i;
        for _ in 0..e / 2 {
            let next = current.forward_move(rank)?;
            moves.push(Move {
                before: current,
                after: next.clone(),
                rank,
                direction: Direction::Forward,
            });
            current = next;
        }
    }
    Ok((current, moves))
}

pub fn compose(beta: &RaftedPartition, eta: &EvenPartition) -> Result<RaftedPartition, RaftError> {
    compose_traced(beta, eta).map(|(rp, _)| rp)
}

impl fmt::Display for RaftedPartition {
    /// `1,[2,3],5,7,[8,9]`; the empty partition is `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.parts();
        if parts.is_empty() {
            return write!(f, "()");
        }
        let mut items = Vec::with_capacity(parts.len());
        let mut i = 0;
        while i < parts.len() {
            if self.rafts.binary_search(&parts[i]).is_ok() {
                items.push(format!("[{},{}]", parts[i], parts[i + 1]));
                i += 2;
            } else {
                items.push(parts[i].to_string());
                i += 1;
            }
        }
        write!(f, "{}", items.join(","))
    }
}

impl fmt::Debug for RaftedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RaftedPartition({self})")
    }
}

impl FromStr for RaftedPartition {
    type Err = RaftError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| RaftError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() || text == "()" {
            return Ok(RaftedPartition::undesignated(Partition::empty()));
        }
        let number = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| fail(&format!("bad part {t:?}")))
        };
        let mut parts = Vec::new();
        let mut rafts = Vec::new();
        let mut rest = text.as_str();
        loop {
            if let Some(inner) = rest.strip_prefix('[') {
                let close = inner.find(']').ok_or_else(|| fail("unclosed '['"))?;
                let pair: Vec<&str> = inner[..close].split(',').collect();
                let [lo, hi] = pair[..] else {
                    return Err(fail("a raft holds exactly two parts"));
                };
                let (lo, hi) = (number(lo)?, number(hi)?);
                if hi != lo + 1 {
                    return Err(fail("raft parts must be consecutive"));
                }
                parts.extend([lo, hi]);
                rafts.push(lo);
                rest = &inner[close + 1..];
            } else {
                let end = rest.find(',').unwrap_or(rest.len());
                parts.push(number(&rest[..end])?);
                rest = &rest[end..];
            }
            match rest.strip_prefix(',') {
                Some(r) if !r.is_empty() => rest = r,
                Some(_) => return Err(fail("trailing comma")),
                None if rest.is_empty() => break,
                None => return Err(fail("expected ','")),
            }
        }
        RaftedPartition::new(Partition::new(parts)?, rafts)
    }
}

/// Shape of a minimal rafted partition with `k >= 1` rafts: raft bottoms
/// `r_1 < ... < r_k` with gaps of at least three, the offsets
/// `mu_1 >= ... >= mu_{k-1} >= 0` of the missing parts `r_j + 2` above
/// `3, 6, ..., 3k - 3`, and a tail of distinct parts `>= r_k + 3`.
///
/// `mu_i = r_{k-i} + 2 - 3(k - i)`, and every `mu_i <= r_k - 3k + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalProfile {
    raft_positions: Vec<u32>,
    mu: Vec<u32>,
    tail: Vec<u32>,
}

impl MinimalProfile {
    pub fn new(raft_positions: Vec<u32>, tail: Vec<u32>) -> Result<Self, RaftError> {
        let bad = |m: &str| Err(RaftError::InvalidProfile(m.to_string()));
        let k = raft_positions.len();
        let Some(&top) = raft_positions.last() else {
            return bad("at least one raft is required");
        };
        if raft_positions[0] < 1 {
            return bad("rafts start at 1 or above");
        }
        if raft_positions.windows(2).any(|w| w[1] < w[0] + 3) {
            return bad("raft bottoms must be at least three apart");
        }
        if tail.first().is_some_and(|&t| t < top + 3) {
            return bad("tail parts must exceed the top raft by three");
        }
        if tail.windows(2).any(|w| w[0] >= w[1]) {
            return bad("tail parts must be strictly increasing");
        }
        let mu = (1..k)
            .map(|i| raft_positions[k - 1 - i] + 2 - 3 * (k - i) as u32)
            .collect();
        Ok(MinimalProfile {
            raft_positions,
            mu,
            tail,
        })
    }

    /// Builds the profile from `r_k = m + 3k - 2`, the offsets `mu` and a tail.
    pub fn from_offsets(k: usize, m: u32, mu: &[u32], tail: Vec<u32>) -> Result<Self, RaftError> {
        if k == 0 || mu.len() != k - 1 {
            return Err(RaftError::InvalidProfile(format!(
                "expected {} offsets",
                k.saturating_sub(1)
            )));
        }
        if mu.windows(2).any(|w| w[0] < w[1]) || mu.iter().any(|&v| v > m) {
            return Err(RaftError::InvalidProfile(
                "offsets must be non-increasing and at most m".into(),
            ));
        }
        let mut rafts: Vec<u32> = (1..k).map(|j| 3 * j as u32 + mu[k - 1 - j] - 2).collect();
        rafts.push(m + 3 * k as u32 - 2);
        MinimalProfile::new(rafts, tail)
    }

    pub fn raft_positions(&self) -> &[u32] {
        &self.raft_positions
    }

    pub fn mu(&self) -> &[u32] {
        &self.mu
    }

    pub fn tail(&self) -> &[u32] {
        &self.tail
    }

    /// `m = r_k - 3k + 2`.
    pub fn m(&self) -> u32 {
        let k = self.raft_positions.len() as u32;
        self.raft_positions[k as usize - 1] + 2 - 3 * k
    }

    pub fn to_rafted(&self) -> RaftedPartition {
        let top = *self.raft_positions.last().expect("non-empty");
        let missing = &self.raft_positions[..self.raft_positions.len() - 1];
        let parts: Vec<u32> = (1..=top + 1)
            .filter(|p| !missing.iter().any(|&r| r + 2 == *p))
            .chain(self.tail.iter().copied())
            .collect();
        RaftedPartition {
            partition: Partition::from_sorted_unchecked(parts),
            rafts: self.raft_positions.clone(),
        }
    }
}

fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Every minimal rafted partition with exactly `k >= 1` rafts and weight
/// `<= max_weight`, built from profiles, ordered by weight then parts.
pub fn enumerate_minimal(k: usize, max_weight: u64) -> Vec<RaftedPartition> {
    assert!(k >= 1, "minimal partitions need at least one raft");
    let kk = k as u64;
    let mut out = Vec::new();
    for m in 0u64.. {
        let top = m + 3 * kk - 2;
        // parts 1..=top+1 minus k-1 missing parts summing to 3*C(k,2) + |mu|
        let full = binom2(top + 2);
        let least = full - 3 * binom2(kk) - m * (kk - 1);
        if least > max_weight {
            break;
        }
        for mu in bounded_nonincreasing(k - 1, m as u32) {
            let prefix = full - 3 * binom2(kk) - mu.iter().map(|&v| u64::from(v)).sum::<u64>();
            if prefix > max_weight {
                continue;
            }
            let head = MinimalProfile::from_offsets(k, m as u32, &mu, Vec::new())
                .expect("offsets in range");
            for_each_distinct_from(top as u32 + 3, max_weight - prefix, |tail| {
                let profile = MinimalProfile {
                    tail: tail.to_vec(),
                    ..head.clone()
                };
                out.push(profile.to_rafted());
            });
        }
    }
    sort_canonical(&mut out);
    out
}

/// Filter-based reference for [`enumerate_minimal`].
pub fn enumerate_minimal_by_filter(k: usize, max_weight: u64) -> Vec<RaftedPartition> {
    let mut out: Vec<RaftedPartition> = enumerate_rafted(Some(k), max_weight)
        .into_iter()
        .filter(RaftedPartition::is_minimal)
        .collect();
    sort_canonical(&mut out);
    out
}

/// Every rafted partition of weight `<= max_weight`, with exactly `k`
/// designated rafts when given; partitions in canonical order, designations
/// in subset order.
pub fn enumerate_rafted(k: Option<usize>, max_weight: u64) -> Vec<RaftedPartition> {
    let mut out = Vec::new();
    for p in enumerate_distinct(max_weight) {
        for d in enumerate_designations(&p) {
            if k.is_none_or(|k| d.len() == k) {
                out.push(RaftedPartition {
                    partition: p.clone(),
                    rafts: d,
                });
            }
        }
    }
    out
}

fn sort_canonical(items: &mut [RaftedPartition]) {
    items.sort_by(|a, b| {
        (a.weight(), a.parts(), a.rafts()).cmp(&(b.weight(), b.parts(), b.rafts()))
    });
}

/// Non-increasing sequences of the given length with entries in `0..=max`.
fn bounded_nonincreasing(len: usize, max: u32) -> Vec<Vec<u32>> {
    fn walk(len: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cap {
            cur.push(v);
            walk(len, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(len, max, &mut Vec::new(), &mut out);
    out
}
