//! Checks of the `floor(n/2)` ceiling on `r_{A-A}(d)`, `d != 0`.
//!
//! [`witnesses`] lists every representation `d = a_{j+k} - a_j` and checks the
//! shape every such list has on a convex set: the `k` are distinct, and sorted
//! by decreasing `k` the start indices climb by at least two. [`search`] runs
//! the check over every integer convex set with bounded gaps.

use rayon::prelude::*;
use serde::Serialize;

use crate::convex::{prefix_sums, ConvexSet, GapSequence, Scalar};
use crate::rational::Rational;
use crate::stats::{diff_stats, diff_stats_of, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RepWitness {
    /// 1-based start index.
    pub j: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureFailure {
    RepeatedK {
        k: usize,
    },
    StartTooClose {
        previous: RepWitness,
        next: RepWitness,
    },
    LastStartTooSmall {
        j_t: usize,
        t: usize,
    },
    LastStartTooLarge {
        j_t: usize,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("difference must be nonzero")]
    ZeroDifference,
    #[error("witness structure broken: {0:?} (input not convex, or a bug)")]
    Structure(StructureFailure),
    #[error("r({d}) = {count} exceeds floor(n/2) = {bound} (input not convex, or a bug)")]
    BoundViolated { d: String, count: u64, bound: u64 },
    #[error("r({d}) = {histogram} from the histogram but {witnesses} witnesses were found")]
    WitnessCount {
        d: String,
        histogram: u64,
        witnesses: usize,
    },
    #[error("search needs n >= 2, got {0}")]
    SetTooSmall(usize),
    #[error("no strictly increasing gap sequence of length {len} fits under max_gap = {max_gap}")]
    Infeasible { len: usize, max_gap: u64 },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl OracleError {
    /// True when the error can only mean the convexity theory was contradicted.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            OracleError::Structure(_)
                | OracleError::BoundViolated { .. }
                | OracleError::WitnessCount { .. }
        )
    }
}

/// Validates a witness list sorted by decreasing `k`.
pub fn check_witness_structure(list: &[RepWitness], n: usize) -> Result<(), StructureFailure> {
    for pair in list.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        if next.k >= prev.k {
            return Err(StructureFailure::RepeatedK { k: next.k });
        }
        if next.j < prev.j + 2 {
            return Err(StructureFailure::StartTooClose {
                previous: prev,
                next,
            });
        }
    }
    if let Some(last) = list.last() {
        let t = list.len();
        if last.j < 2 * t - 1 {
            return Err(StructureFailure::LastStartTooSmall { j_t: last.j, t });
        }
        if last.j > n - 1 {
            return Err(StructureFailure::LastStartTooLarge { j_t: last.j, n });
        }
    }
    Ok(())
}

/// Every `(j, k)` with `a_{j+k} - a_j = d`, ordered by decreasing `k`.
///
/// For fixed `j` the differences `a_{j+k} - a_j` increase with `k`, so each
/// start index is resolved by one binary search.
pub fn witnesses_of<T: Scalar>(elements: &[T], d: &T) -> Result<Vec<RepWitness>, OracleError> {
    if *d == T::zero() {
        return Err(OracleError::ZeroDifference);
    }
    let n = elements.len();
    let mut list = Vec::new();
    for (idx, a) in elements.iter().enumerate() {
        let target = a.sum(d);
        if let Ok(pos) = elements[idx + 1..].binary_search(&target) {
            list.push(RepWitness {
                j: idx + 1,
                k: pos + 1,
            });
        }
    }
    list.sort_by(|x, y| y.k.cmp(&x.k).then(x.j.cmp(&y.j)));
    check_witness_structure(&list, n).map_err(OracleError::Structure)?;
    Ok(list)
}

pub fn witnesses(set: &ConvexSet, d: &Rational) -> Result<Vec<RepWitness>, OracleError> {
    witnesses_of(set.elements(), d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxRep {
    pub d: Rational,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub n: usize,
    pub bound: u64,
    pub max_rep: MaxRep,
    /// `bound - max count`
    pub margin: u64,
    /// Difference whose witnesses are listed: the maximizer unless one was given.
    pub d: Rational,
    pub count: u64,
    pub witnesses: Vec<RepWitness>,
}

/// Confirms `max_d r(d) <= floor(n/2)` and checks witness structure for the
/// maximizing difference and for `query`, if given.
pub fn verify_bound(
    set: &ConvexSet,
    query: Option<&Rational>,
) -> Result<VerifyReport, OracleError> {
    if set.len() < 2 {
        return Err(StatsError::TooSmall(set.len()).into());
    }
    let stats = diff_stats(set);
    let (d_max, count) = stats.max_rep()?;
    let bound = set.len() as u64 / 2;
    if count > bound {
        return Err(OracleError::BoundViolated {
            d: d_max.to_string(),
            count,
            bound,
        });
    }
    let max_witnesses = witnesses(set, &d_max)?;
    if max_witnesses.len() as u64 != count {
        return Err(OracleError::WitnessCount {
            d: d_max.to_string(),
            histogram: count,
            witnesses: max_witnesses.len(),
        });
    }
    let (d, count_d, list) = match query {
        Some(q) => {
            let list = witnesses(set, q)?;
            (q.clone(), stats.rep(q), list)
        }
        None => (d_max.clone(), count, max_witnesses),
    };
    Ok(VerifyReport {
        ok: true,
        n: set.len(),
        bound,
        max_rep: MaxRep { d: d_max, count },
        margin: bound - count,
        d,
        count: count_d,
        witnesses: list,
    })
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn check_params(n: usize, max_gap: u64) -> Result<(), OracleError> {
    if n < 2 {
        return Err(OracleError::SetTooSmall(n));
    }
    if max_gap < (n - 1) as u64 {
        return Err(OracleError::Infeasible {
            len: n - 1,
            max_gap,
        });
    }
    Ok(())
}

/// Visits, in lexicographic order, every strictly increasing sequence of
/// `len` integers at most `hi` whose first entry is `first`.
fn visit_with_first<F: FnMut(&[u64])>(first: u64, len: usize, hi: u64, f: &mut F) {
    let mut seq: Vec<u64> = (0..len as u64).map(|i| first + i).collect();
    if seq.last().is_some_and(|&x| x > hi) {
        return;
    }
    loop {
        f(&seq);
        // advance the rightmost position that still has room, never the first
        let mut pos = len;
        loop {
            if pos <= 1 {
                return;
            }
            pos -= 1;
            let room = hi - (len - 1 - pos) as u64;
            if seq[pos] < room {
                break;
            }
        }
        seq[pos] += 1;
        for i in pos + 1..len {
            seq[i] = seq[i - 1] + 1;
        }
    }
}

/// Sequentially visits every gap sequence of length `n - 1` in `[1, max_gap]`
/// in lexicographic order.
pub fn for_each_gap_sequence<F: FnMut(&[u64])>(
    n: usize,
    max_gap: u64,
    mut f: F,
) -> Result<(), OracleError> {
    check_params(n, max_gap)?;
    let len = n - 1;
    for first in 1..=max_gap - (len as u64 - 1) {
        visit_with_first(first, len, max_gap, &mut f);
    }
    Ok(())
}

/// Folds every gap sequence into a summary. Work is split by the first gap;
/// each slice folds in lexicographic order and slices are merged in order of
/// their first gap, so the result does not depend on scheduling.
pub fn enumerate_convex<S, F, M>(
    n: usize,
    max_gap: u64,
    parallel: bool,
    visit: F,
    merge: M,
) -> Result<S, OracleError>
where
    S: Default + Send,
    F: Fn(&mut S, &[u64]) + Sync,
    M: Fn(S, S) -> S,
{
    check_params(n, max_gap)?;
    let len = n - 1;
    let firsts: Vec<u64> = (1..=max_gap - (len as u64 - 1)).collect();
    let slice = |first: &u64| {
        let mut acc = S::default();
        visit_with_first(*first, len, max_gap, &mut |g| visit(&mut acc, g));
        acc
    };
    let parts: Vec<S> = if parallel {
        firsts.par_iter().map(slice).collect()
    } else {
        firsts.iter().map(slice).collect()
    };
    Ok(parts.into_iter().fold(S::default(), merge))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub gaps: Vec<u64>,
    pub d: i64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureViolation {
    pub gaps: Vec<u64>,
    pub d: i64,
    pub failure: StructureFailure,
}

#[derive(Debug, Clone, Default)]
struct Partial {
    sets: u64,
    witness_lists: u64,
    max_count: u64,
    first_extremal: Option<Vec<u64>>,
    violations: Vec<Violation>,
    structure_failures: Vec<StructureViolation>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.sets += other.sets;
        self.witness_lists += other.witness_lists;
        if other.max_count > self.max_count {
            self.max_count = other.max_count;
            self.first_extremal = other.first_extremal;
        } else if self.first_extremal.is_none() {
            self.first_extremal = other.first_extremal;
        }
        self.violations.extend(other.violations);
        self.structure_failures.extend(other.structure_failures);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub max_gap: u64,
    pub sets_enumerated: u64,
    /// `C(max_gap, n - 1)`
    pub expected_sets: u64,
    pub max_count_found: u64,
    pub bound: u64,
    pub attained: bool,
    /// Witness lists (one per set and difference with `r >= 2`) that passed
    /// the structure check.
    pub witness_lists_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal_witness: Option<GapSequence>,
    pub violations: Vec<Violation>,
    pub structure_failures: Vec<StructureViolation>,
}

impl SearchReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
            && self.structure_failures.is_empty()
            && self.sets_enumerated == self.expected_sets
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Report the lexicographically first gap sequence reaching the maximum.
    pub attain: bool,
    pub parallel: bool,
}

fn visit_set(acc: &mut Partial, gaps: &[u64], bound: u64) {
    let elements = prefix_sums(gaps);
    let stats = diff_stats_of(&elements);
    acc.sets += 1;
    let mut set_max = 0;
    for (&d, &count) in &stats.rep_counts {
        set_max = set_max.max(count);
        if count > bound {
            acc.violations.push(Violation {
                gaps: gaps.to_vec(),
                d,
                count,
            });
        }
        if count >= 2 {
            match witnesses_of(&elements, &d) {
                Ok(list) if list.len() as u64 == count => acc.witness_lists += 1,
                Ok(list) => acc.violations.push(Violation {
                    gaps: gaps.to_vec(),
                    d,
                    count: list.len() as u64,
                }),
                Err(OracleError::Structure(failure)) => {
                    acc.structure_failures.push(StructureViolation {
                        gaps: gaps.to_vec(),
                        d,
                        failure,
                    })
                }
                Err(e) => unreachable!("positive difference rejected: {e}"),
            }
        }
    }
    if set_max > acc.max_count {
        acc.max_count = set_max;
        acc.first_extremal = Some(gaps.to_vec());
    }
}

/// Exhaustive check over all `C(max_gap, n - 1)` integer convex sets of size
/// `n` starting at 0 with gaps at most `max_gap`.
pub fn search(n: usize, max_gap: u64, opts: SearchOptions) -> Result<SearchReport, OracleError> {
    let bound = n as u64 / 2;
    let partial = enumerate_convex(
        n,
        max_gap,
        opts.parallel,
        |acc: &mut Partial, gaps| visit_set(acc, gaps, bound),
        Partial::merge,
    )?;
    let extremal_witness = if opts.attain {
        partial
            .first_extremal
            .map(|g| GapSequence::new(g).expect("enumerated gaps are strictly increasing"))
    } else {
        None
    };
    Ok(SearchReport {
        n,
        max_gap,
        sets_enumerated: partial.sets,
        expected_sets: binomial(max_gap, (n - 1) as u64),
        max_count_found: partial.max_count,
        bound,
        attained: partial.max_count == bound,
        witness_lists_checked: partial.witness_lists,
        extremal_witness,
        violations: partial.violations,
        structure_failures: partial.structure_failures,
    })
}
