//! Exact rational scalar.
//!
//! Every set element, gap and construction parameter is a [`Rational`]. Values
//! are always held in lowest terms with a positive denominator, so derived
//! `Eq`/`Hash` agree with numeric equality and the type can key a map.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("malformed rational {0:?}: expected \"p\" or \"p/q\"")]
    Malformed(String),
    #[error("rational {0:?} has a zero denominator")]
    ZeroDenominator(String),
    #[error("rational {text:?} is not in canonical form (expected {canonical:?})")]
    NonCanonical { text: String, canonical: String },
    #[error("lcm of denominators needs at least one value")]
    EmptyList,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Rational(self.0.recip()))
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    /// Integer value, if the rational is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    /// Floor of `self * 10^digits`, used for fixed-point rendering.
    pub fn floor_scaled(&self, digits: u32) -> BigInt {
        let scaled = &self.0 * BigRational::from_integer(BigInt::from(10u32).pow(digits));
        scaled.floor().to_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }
}

/// Smallest positive integer `L` with `L * v` integral for every `v`.
pub fn lcm_of_denominators<'a, I>(values: I) -> Result<BigUint, RationalError>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut iter = values.into_iter().peekable();
    if iter.peek().is_none() {
        return Err(RationalError::EmptyList);
    }
    let l = iter.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    Ok(l.to_biguint().expect("denominators are positive"))
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl Rational {
    /// Parses "p" or "p/q" without insisting on canonical form.
    pub fn parse_lenient(text: &str) -> Result<Self, RationalError> {
        let malformed = || RationalError::Malformed(text.to_string());
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let unsigned = num.strip_prefix('-').unwrap_or(num);
        if !is_digits(unsigned) {
            return Err(malformed());
        }
        let numer: BigInt = num.parse().map_err(|_| malformed())?;
        let denom: BigInt = match den {
            Some(d) if is_digits(d) => d.parse().map_err(|_| malformed())?,
            Some(_) => return Err(malformed()),
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(RationalError::ZeroDenominator(text.to_string()));
        }
        Ok(Rational::new(numer, denom))
    }
}

/// Strict parser: the text must be exactly the canonical rendering of its value.
impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let value = Rational::parse_lenient(text)?;
        let canonical = value.to_string();
        if canonical != text {
            return Err(RationalError::NonCanonical {
                text: text.to_string(),
                canonical,
            });
        }
        Ok(value)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigUint> for Rational {
    fn from(n: BigUint) -> Self {
        Rational::from_integer(BigInt::from_biguint(Sign::Plus, n))
    }
}

/// Shorthand used throughout the tests: `q(3, 4)` is 3/4.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}
