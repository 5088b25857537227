//! Arbitrary-precision rationals, always stored in lowest terms.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number with positive denominator and coprime parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

/// Failure to read a rational from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty entry")]
    Empty,
    #[error("invalid entry `{0}`: expected an optional `-`, digits, and an optional `/` with digits")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_bigint(value: BigInt) -> Self {
        Rational(BigRational::from_integer(value))
    }

    /// Builds `numer / denom`, reducing. Returns `None` for a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Option<Self> {
        Self::from_parts(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn from_parts(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Rational(BigRational::new(numer, denom)))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always strictly positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Self {
        Rational(self.0.floor())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

/// Rewrites `values` over their least common denominator.
///
/// Returns the scaled numerators and the common denominator `d`, so that
/// `values[k] == numers[k] / d` for every `k`.
pub fn common_denominator(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let mut denom = BigInt::one();
    for v in values {
        if !v.denom().is_one() {
            denom = denom.lcm(v.denom());
        }
    }
    let numers = values
        .iter()
        .map(|v| {
            if v.denom() == &denom {
                v.numer().clone()
            } else {
                v.numer() * (&denom / v.denom())
            }
        })
        .collect();
    (numers, denom)
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_integer(value)
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
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

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Grammar: optional `-`, one or more digits, optionally `/` and one or more digits.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let malformed = || ParseRationalError::Malformed(String::from(s));
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (numer, denom) = match body.split_once('/') {
            Some((n, d)) => (
                parse_digits(n).ok_or_else(malformed)?,
                parse_digits(d).ok_or_else(malformed)?,
            ),
            None => (parse_digits(body).ok_or_else(malformed)?, BigInt::one()),
        };
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(String::from(s)));
        }
        let numer = if negative {
            BigInt::from_biguint(Sign::Minus, numer.into_parts().1)
        } else {
            numer
        };
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division by zero panics, as for the underlying integer types.
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

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

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && *self.0.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_integer(*other)))
    }
}

/// Shorthand for `Rational::new(n, d).unwrap()` in tests and fixtures.
#[macro_export]
macro_rules! q {
    ($n:expr) => {
        $crate::Rational::from_integer($n)
    };
    ($n:expr, $d:expr) => {
        $crate::Rational::new($n, $d).expect("nonzero denominator")
    };
}
