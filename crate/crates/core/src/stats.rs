//! Representation functions, additive energy and rich-difference counts.
//!
//! All counts are over ordered pairs. Histograms are keyed by positive
//! differences only; `r(-x) = r(x)` and `r(0) = n` recover the rest.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::convex::{ConvexSet, Scalar};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least 2 elements, got {0}")]
    TooSmall(usize),
    #[error("threshold must be at least 1")]
    ZeroThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffStats<T = Rational> {
    pub n: usize,
    /// `r_{A-A}(d)` for every positive `d` in `A - A`.
    pub rep_counts: BTreeMap<T, u64>,
    /// `|A - A|`, counting 0 and both signs.
    pub diff_set_size: usize,
    /// `E(A) = sum_x r(x)^2`.
    pub energy: u128,
}

impl<T: Scalar> DiffStats<T> {
    pub fn rep(&self, d: &T) -> u64 {
        match d.cmp(&T::zero()) {
            std::cmp::Ordering::Equal => self.n as u64,
            std::cmp::Ordering::Greater => self.rep_counts.get(d).copied().unwrap_or(0),
            std::cmp::Ordering::Less => {
                let pos = T::zero().diff(d);
                self.rep_counts.get(&pos).copied().unwrap_or(0)
            }
        }
    }

    /// Number of positive differences with at least `t` representations.
    pub fn rich_count(&self, t: u64) -> Result<u64, StatsError> {
        if t == 0 {
            return Err(StatsError::ZeroThreshold);
        }
        Ok(self.rep_counts.values().filter(|&&c| c >= t).count() as u64)
    }

    /// Most represented positive difference; ties go to the smallest.
    pub fn max_rep(&self) -> Result<(T, u64), StatsError> {
        let mut best: Option<(&T, u64)> = None;
        for (d, &c) in &self.rep_counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((d, c));
            }
        }
        best.map(|(d, c)| (d.clone(), c))
            .ok_or(StatsError::TooSmall(self.n))
    }
}

/// Sorted positive differences of a convex sequence with multiplicities.
///
/// For each shift `k` the row `j -> a_{j+k} - a_j` is strictly increasing on a
/// convex input, so the `n - 1` rows are merged with a heap instead of hashing.
pub fn diff_histogram<T: Scalar>(elements: &[T]) -> BTreeMap<T, u64> {
    let n = elements.len();
    let row = |k: usize, j: usize| elements[j + k].diff(&elements[j]);
    let mut heap: BinaryHeap<Reverse<(T, usize, usize)>> =
        (1..n).map(|k| Reverse((row(k, 0), k, 0))).collect();
    let mut out = BTreeMap::new();
    let mut run: Option<(T, u64)> = None;
    while let Some(Reverse((value, k, j))) = heap.pop() {
        if j + 1 + k < n {
            let next = row(k, j + 1);
            debug_assert!(next > value, "input is not convex");
            heap.push(Reverse((next, k, j + 1)));
        }
        run = match run {
            Some((v, c)) if v == value => Some((v, c + 1)),
            Some((v, c)) => {
                out.insert(v, c);
                Some((value, 1))
            }
            None => Some((value, 1)),
        };
    }
    if let Some((v, c)) = run {
        out.insert(v, c);
    }
    out
}

pub fn diff_stats_of<T: Scalar>(elements: &[T]) -> DiffStats<T> {
    let n = elements.len();
    let rep_counts = diff_histogram(elements);
    let squares: u128 = rep_counts
        .values()
        .map(|&c| (c as u128) * (c as u128))
        .sum();
    let energy = (n as u128) * (n as u128) + 2 * squares;
    DiffStats {
        n,
        diff_set_size: 2 * rep_counts.len() + 1,
        rep_counts,
        energy,
    }
}

pub fn diff_stats(set: &ConvexSet) -> DiffStats {
    diff_stats_of(set.elements())
}

/// Direct scan over all ordered pairs `(a, b)` with `a - b = x`.
pub fn rep_diff_of<T: Scalar>(elements: &[T], x: &T) -> u64 {
    let mut count = 0;
    for a in elements {
        for b in elements {
            if &a.diff(b) == x {
                count += 1;
            }
        }
    }
    count
}

pub fn rep_diff(set: &ConvexSet, x: &Rational) -> u64 {
    rep_diff_of(set.elements(), x)
}

/// Direct scan over all ordered pairs `(a, b)` with `a + b = c`.
pub fn rep_sum_of<T: Scalar>(elements: &[T], c: &T) -> u64 {
    let mut count = 0;
    for a in elements {
        for b in elements {
            if &a.sum(b) == c {
                count += 1;
            }
        }
    }
    count
}

pub fn rep_sum(set: &ConvexSet, c: &Rational) -> u64 {
    rep_sum_of(set.elements(), c)
}

/// `r_{A+A}(c)` for every `c` in `A + A`.
pub fn sum_histogram<T: Scalar>(elements: &[T]) -> BTreeMap<T, u64> {
    let mut out = BTreeMap::new();
    for (i, a) in elements.iter().enumerate() {
        *out.entry(a.sum(a)).or_insert(0) += 1;
        for b in &elements[i + 1..] {
            *out.entry(a.sum(b)).or_insert(0) += 2;
        }
    }
    out
}

/// Largest `r_{A+A}(c)`, ties to the smallest `c`. `None` for the empty set.
pub fn max_rep_sum_of<T: Scalar>(elements: &[T]) -> Option<(T, u64)> {
    let hist = sum_histogram(elements);
    let mut best: Option<(T, u64)> = None;
    for (c, n) in hist {
        if best.as_ref().is_none_or(|(_, bn)| n > *bn) {
            best = Some((c, n));
        }
    }
    best
}

pub fn rich_count(set: &ConvexSet, t: u64) -> Result<u64, StatsError> {
    diff_stats(set).rich_count(t)
}

pub fn max_rep_diff(set: &ConvexSet) -> Result<(Rational, u64), StatsError> {
    if set.len() < 2 {
        return Err(StatsError::TooSmall(set.len()));
    }
    let (d, c) = diff_stats(set).max_rep()?;
    debug_assert!(
        c <= set.len() as u64 / 2,
        "r(d) above floor(n/2) on a convex set"
    );
    Ok((d, c))
}
