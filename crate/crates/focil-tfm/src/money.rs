//! Exact rational money arithmetic.
//!
//! Every quantity in the mechanism (bids, fees, bribes, utilities, and the
//! per-unit parameters they are derived from) is an arbitrary-precision
//! rational. Floating point is never used: the property checkers compare
//! utilities for exact equality against closed-form caps, and a single ulp of
//! rounding error would turn a tight bound into a spurious violation.
//!
//! [`Money`] serializes as the string `"numerator/denominator"` in lowest
//! terms with a positive denominator, e.g. `"3/2"`, `"-1/4"`, `"5/1"`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::{BigInt, BigRational, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// An exact rational quantity of the abstract currency (or a dimensionless
/// rational such as a probability or a split share; the arithmetic is the
/// same and mixing is intentional).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Money(BigRational);

impl Money {
    /// The zero amount.
    pub fn zero() -> Self {
        Money(BigRational::zero())
    }

    /// The amount `n/1`.
    pub fn from_int(n: i64) -> Self {
        Money(BigRational::from_integer(BigInt::from(n)))
    }

    /// The amount `n/1` from an unsigned count.
    pub fn from_count(n: usize) -> Self {
        Money(BigRational::from_integer(BigInt::from(n)))
    }

    /// The amount `num/den`.
    ///
    /// # Panics
    ///
    /// Panics if `den == 0`; this constructor is for literals in code, not
    /// for untrusted input (use [`str::parse`] for that).
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "money literal with zero denominator");
        Money(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Wraps an existing big rational.
    pub fn from_big(r: BigRational) -> Self {
        Money(r)
    }

    /// Borrows the underlying big rational.
    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// True if the amount is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True if the amount is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True if the amount is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `max(self, 0)`, the clamp used by every fee formula.
    pub fn clamp_zero(&self) -> Money {
        if self.is_negative() {
            Money::zero()
        } else {
            self.clone()
        }
    }
}

impl Default for Money {
    fn default() -> Self {
        Money::zero()
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Money({})", self)
    }
}

impl FromStr for Money {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::MoneyParse(s.to_string());
        let mut parts = s.trim().splitn(2, '/');
        let numer: BigInt = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(bad)?;
        let denom: BigInt = match parts.next() {
            Some(p) => p.trim().parse().map_err(|_| bad())?,
            None => BigInt::from(1),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Money(BigRational::new(numer, denom)))
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Money {
            type Output = Money;
            fn $method(self, rhs: Money) -> Money {
                Money((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Money> for Money {
            type Output = Money;
            fn $method(self, rhs: &Money) -> Money {
                Money((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Money> for &Money {
            type Output = Money;
            fn $method(self, rhs: Money) -> Money {
                Money((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Money> for &Money {
            type Output = Money;
            fn $method(self, rhs: &Money) -> Money {
                Money((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Money {
    type Output = Money;
    /// Exact division. Panics if `rhs` is zero.
    fn div(self, rhs: Money) -> Money {
        assert!(!rhs.is_zero(), "division of money by zero");
        Money(self.0 / rhs.0)
    }
}

impl Div<&Money> for &Money {
    type Output = Money;
    fn div(self, rhs: &Money) -> Money {
        assert!(!rhs.is_zero(), "division of money by zero");
        Money(&self.0 / &rhs.0)
    }
}

impl Div<&Money> for Money {
    type Output = Money;
    fn div(self, rhs: &Money) -> Money {
        assert!(!rhs.is_zero(), "division of money by zero");
        Money(self.0 / &rhs.0)
    }
}

impl Div<Money> for &Money {
    type Output = Money;
    fn div(self, rhs: Money) -> Money {
        assert!(!rhs.is_zero(), "division of money by zero");
        Money(&self.0 / rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Neg for &Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-&self.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl AddAssign<&Money> for Money {
    fn add_assign(&mut self, rhs: &Money) {
        self.0 += &rhs.0;
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl SubAssign<&Money> for Money {
    fn sub_assign(&mut self, rhs: &Money) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, x| acc + x)
    }
}
