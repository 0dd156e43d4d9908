//! Extremal convex sets with one very popular difference, and glued families of
//! them with many popular differences.

use num_bigint::BigInt;

use crate::convex::{ConvexError, ConvexSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("t and copies must both be at least 1")]
    ZeroGlueParameter,
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(Rational),
    #[error("delta = {delta} is too large for m = {m}: need delta < 1/(m-2) = {bound}")]
    DeltaTooLarge {
        m: u64,
        delta: Box<Rational>,
        bound: Box<Rational>,
    },
    #[error("construction produced a non-convex set: {0}")]
    NotConvex(#[from] ConvexError),
}

/// A convex set of size `2m` whose difference `d = a_{m+1}` has exactly `m`
/// representations `a_{j+k} - a_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionResult {
    pub set: ConvexSet,
    pub d: Rational,
    pub delta: Rational,
    pub m: u64,
}

/// 1 for `m <= 2` (no constraint), otherwise `1/(2(m-1))`.
pub fn default_delta(m: u64) -> Rational {
    if m <= 2 {
        Rational::one()
    } else {
        Rational::new(1, BigInt::from(2 * (m - 1)))
    }
}

/// Strict upper bound on delta, present only for `m >= 3`.
pub fn delta_bound(m: u64) -> Option<Rational> {
    (m >= 3).then(|| Rational::new(1, BigInt::from(m - 2)))
}

/// The raw `2m` elements for a given delta with no admissibility check.
///
/// First half: `a_k = (k-1) + delta (k-2)(k-1)/2` for `1 <= k <= m+1`, so the
/// gaps are `1, 1 + delta, 1 + 2 delta, ...`. Second half:
/// `a_{m+1+i} = a_{1+2i} + a_{m+1}` for `1 <= i <= m-1`.
pub fn construction_elements(m: u64, delta: &Rational) -> Vec<Rational> {
    let m = m as usize;
    let mut a: Vec<Rational> = Vec::with_capacity(2 * m);
    for k in 1..=m as i64 + 1 {
        let tri = Rational::new((k - 2) * (k - 1), 2);
        a.push(Rational::from(k - 1) + delta * &tri);
    }
    let d = a[m].clone();
    for i in 1..m {
        // a_{1+2i} sits at 0-based index 2i
        let next = &a[2 * i] + &d;
        a.push(next);
    }
    a.truncate(2 * m);
    a
}

pub fn construct(m: u64, delta: Option<Rational>) -> Result<ConstructionResult, ConstructError> {
    if m == 0 {
        return Err(ConstructError::ZeroM);
    }
    let delta = delta.unwrap_or_else(|| default_delta(m));
    if !delta.is_positive() {
        return Err(ConstructError::NonPositiveDelta(delta));
    }
    if let Some(bound) = delta_bound(m) {
        if delta >= bound {
            return Err(ConstructError::DeltaTooLarge {
                m,
                delta: Box::new(delta),
                bound: Box::new(bound),
            });
        }
    }
    let elements = construction_elements(m, &delta);
    let set = ConvexSet::validate(elements)?;
    let d = set.a(m as usize + 1).clone();
    Ok(ConstructionResult { set, d, delta, m })
}

/// Several rescaled copies of `construct(t)` laid end to end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedResult {
    pub set: ConvexSet,
    pub t: u64,
    pub copies: u64,
    pub delta: Rational,
    /// Integer dilation factor applied to each copy, strictly increasing.
    pub scales: Vec<u64>,
    /// Translation applied to each copy after scaling.
    pub offsets: Vec<Rational>,
    /// `scales[j] * d`, one per copy, each with at least `t` representations.
    pub rich_differences: Vec<Rational>,
}

/// Glues `copies` images of `construct(t)` so the whole gap sequence stays
/// strictly increasing.
///
/// Copy `j+1` gets the smallest integer scale whose smallest gap exceeds the
/// last gap of copy `j` by more than one; the gap bridging the two copies is
/// the midpoint of those two gaps.
pub fn glue(t: u64, copies: u64) -> Result<GluedResult, ConstructError> {
    if t == 0 || copies == 0 {
        return Err(ConstructError::ZeroGlueParameter);
    }
    let base = construct(t, None)?;
    let base_gaps = base.set.gaps()?;
    let base_min_gap = base_gaps[0].clone();
    let base_last_gap = base_gaps[base_gaps.len() - 1].clone();
    let base_first = base.set.first().clone();

    let mut elements: Vec<Rational> = base.set.elements().to_vec();
    let mut scales = vec![1u64];
    let mut offsets = vec![Rational::zero()];
    for _ in 1..copies {
        let prev_scale = *scales.last().unwrap();
        let prev_last_gap = Rational::from(prev_scale as i64) * &base_last_gap;
        // smallest integer mu with mu * min_gap > prev_last_gap + 1
        let threshold = (&prev_last_gap + &Rational::one()) * base_min_gap.recip().unwrap();
        let floor = threshold.floor_scaled(0);
        let mu: u64 = u64::try_from(floor + 1).expect("scale fits in u64");
        assert!(mu > prev_scale, "copy scales must strictly increase");
        let mu_r = Rational::from(mu as i64);
        let first_gap = &mu_r * &base_min_gap;
        let bridge = (&prev_last_gap + &first_gap) * Rational::new(1, 2);
        let offset = elements.last().unwrap() + &bridge - &mu_r * &base_first;
        elements.extend(base.set.elements().iter().map(|a| &(&mu_r * a) + &offset));
        scales.push(mu);
        offsets.push(offset);
    }
    let set = ConvexSet::validate(elements)?;
    let rich_differences = scales
        .iter()
        .map(|&s| Rational::from(s as i64) * &base.d)
        .collect();
    Ok(GluedResult {
        set,
        t,
        copies,
        delta: base.delta,
        scales,
        offsets,
        rich_differences,
    })
}
