//! Convex sets: strictly increasing sequences with strictly increasing gaps.
//!
//! Indices in errors, margins and witnesses are 1-based, so `a_1` is the
//! smallest element.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::rational::{lcm_of_denominators, Rational};

/// Exact ordered additive group element. Implemented for [`Rational`] and for
/// `i64`, which the exhaustive search uses on integer gap sequences.
pub trait Scalar: Clone + Ord + Hash + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn diff(&self, other: &Self) -> Self;
    fn sum(&self, other: &Self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn diff(&self, other: &Self) -> Self {
        self - other
    }
    fn sum(&self, other: &Self) -> Self {
        self + other
    }
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn diff(&self, other: &Self) -> Self {
        self.checked_sub(*other).expect("i64 difference overflow")
    }
    fn sum(&self, other: &Self) -> Self {
        self.checked_add(*other).expect("i64 sum overflow")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvexError {
    #[error("Empty: a set needs at least one element")]
    Empty,
    #[error("NotSorted({0}): a_{0} >= a_{next}", next = .0 + 1)]
    NotSorted(usize),
    #[error("NotConvex({0}): a_{0} - a_{prev} >= a_{next} - a_{0}", prev = .0 - 1, next = .0 + 1)]
    NotConvex(usize),
    #[error("need at least 2 elements, got {0}")]
    TooSmall(usize),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Rational),
    #[error("gap sequence must be strictly increasing positive integers: {0:?}")]
    BadGaps(Vec<u64>),
}

/// Checks the two defining conditions on any ordered scalar sequence.
pub fn check_convex<T: Scalar>(elements: &[T]) -> Result<(), ConvexError> {
    if elements.is_empty() {
        return Err(ConvexError::Empty);
    }
    if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
        return Err(ConvexError::NotSorted(i + 1));
    }
    for i in 1..elements.len().saturating_sub(1) {
        let left = elements[i].diff(&elements[i - 1]);
        let right = elements[i + 1].diff(&elements[i]);
        if left >= right {
            return Err(ConvexError::NotConvex(i + 1));
        }
    }
    Ok(())
}

/// A validated convex set `a_1 < a_2 < ... < a_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConvexSet {
    elements: Vec<Rational>,
}

impl fmt::Debug for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.elements).finish()
    }
}

impl ConvexSet {
    pub fn validate(elements: Vec<Rational>) -> Result<Self, ConvexError> {
        check_convex(&elements)?;
        Ok(ConvexSet { elements })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self, ConvexError> {
        Self::validate(values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// 1-based access: `a(1)` is the minimum.
    pub fn a(&self, index: usize) -> &Rational {
        &self.elements[index - 1]
    }

    pub fn first(&self) -> &Rational {
        &self.elements[0]
    }

    pub fn last(&self) -> &Rational {
        &self.elements[self.elements.len() - 1]
    }

    pub fn into_elements(self) -> Vec<Rational> {
        self.elements
    }

    pub fn gaps(&self) -> Result<Vec<Rational>, ConvexError> {
        if self.len() < 2 {
            return Err(ConvexError::TooSmall(self.len()));
        }
        Ok(self.elements.windows(2).map(|w| &w[1] - &w[0]).collect())
    }

    /// `(a_{i+1} - a_i) - (a_i - a_{i-1})` for `2 <= i <= n-1`; positive on a
    /// convex set.
    pub fn convexity_margin(&self, index: usize) -> Option<Rational> {
        if index < 2 || index + 1 > self.len() {
            return None;
        }
        let right = self.a(index + 1) - self.a(index);
        let left = self.a(index) - self.a(index - 1);
        Some(right - left)
    }

    pub fn translate(&self, shift: &Rational) -> ConvexSet {
        ConvexSet {
            elements: self.elements.iter().map(|a| a + shift).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Result<ConvexSet, ConvexError> {
        if !factor.is_positive() {
            return Err(ConvexError::NonPositiveScale(factor.clone()));
        }
        Ok(ConvexSet {
            elements: self.elements.iter().map(|a| a * factor).collect(),
        })
    }

    /// Multiplies through by the lcm of all denominators.
    pub fn dilate_to_integers(&self) -> (ConvexSet, BigUint) {
        let l = lcm_of_denominators(&self.elements).expect("convex sets are non-empty");
        let factor = Rational::from(l.clone());
        let dilated = self.scale(&factor).expect("lcm is positive");
        (dilated, l)
    }

    pub fn from_gap_sequence(gaps: &GapSequence) -> ConvexSet {
        ConvexSet {
            elements: gaps.elements().into_iter().map(Rational::from).collect(),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Translation-normalized integer convex set `{0, g_1, g_1 + g_2, ...}`,
/// stored as its strictly increasing gap vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GapSequence(Vec<u64>);

impl GapSequence {
    pub fn new(gaps: Vec<u64>) -> Result<Self, ConvexError> {
        let increasing = gaps.windows(2).all(|w| w[0] < w[1]);
        if gaps.first().is_some_and(|&g| g == 0) || !increasing {
            return Err(ConvexError::BadGaps(gaps));
        }
        Ok(GapSequence(gaps))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Prefix sums starting at 0.
    pub fn elements(&self) -> Vec<i64> {
        prefix_sums(&self.0)
    }
}

pub(crate) fn prefix_sums(gaps: &[u64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(gaps.len() + 1);
    let mut acc = 0i64;
    out.push(0);
    for &g in gaps {
        acc += g as i64;
        out.push(acc);
    }
    out
}

impl TryFrom<Vec<u64>> for GapSequence {
    type Error = ConvexError;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        GapSequence::new(v)
    }
}

impl From<GapSequence> for Vec<u64> {
    fn from(g: GapSequence) -> Self {
        g.0
    }
}
