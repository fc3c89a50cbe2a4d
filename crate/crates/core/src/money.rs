//! Exact monetary quantities.
//!
//! Every valuation, bid, threshold and payment is a nonnegative rational held
//! in reduced form, so threshold ties (`b_i == t_i`) are decided exactly.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul};
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};
use thiserror::Error;

/// Signed exact quantity. Utilities can be negative (a winner who overpays).
pub type Utility = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoneyError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("negative amount")]
    Negative,
    #[error("malformed rational literal `{0}`")]
    Malformed(alloc::string::String),
    #[error("arithmetic overflow")]
    Overflow,
}

/// A nonnegative exact rational.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Money(Ratio<i128>);

impl Money {
    pub const ZERO: Money = Money(Ratio::new_raw(0, 1));
    pub const ONE: Money = Money(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self, MoneyError> {
        if denom == 0 {
            return Err(MoneyError::ZeroDenominator);
        }
        let r = Ratio::new(numer, denom);
        Self::from_ratio(r)
    }

    pub fn from_ratio(r: Ratio<i128>) -> Result<Self, MoneyError> {
        if r < Ratio::zero() {
            Err(MoneyError::Negative)
        } else {
            Ok(Money(r))
        }
    }

    pub fn from_integer(n: u64) -> Self {
        Money(Ratio::from_integer(n as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_ratio(&self) -> Ratio<i128> {
        self.0
    }

    /// The same amount as a signed utility.
    pub fn utility(&self) -> Utility {
        self.0
    }

    pub fn checked_add(&self, rhs: &Money) -> Option<Money> {
        self.0.checked_add(&rhs.0).map(Money)
    }

    /// `None` when the result would be negative or overflow.
    pub fn checked_sub(&self, rhs: &Money) -> Option<Money> {
        if rhs > self {
            return None;
        }
        self.0.checked_sub(&rhs.0).map(Money)
    }

    pub fn checked_mul(&self, rhs: &Money) -> Option<Money> {
        self.0.checked_mul(&rhs.0).map(Money)
    }

    /// Exact midpoint of two amounts.
    pub fn midpoint(&self, other: &Money) -> Money {
        let sum = self.checked_add(other).expect("money overflow");
        Money(sum.0 / Ratio::from_integer(2))
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn times(&self, count: usize) -> Money {
        self.checked_mul(&Money::from_integer(count as u64))
            .expect("money overflow")
    }
}

impl Default for Money {
    fn default() -> Self {
        Money::ZERO
    }
}

impl Add for Money {
    type Output = Money;

    fn add(self, rhs: Money) -> Money {
        self.checked_add(&rhs).expect("money overflow")
    }
}

impl Mul for Money {
    type Output = Money;

    fn mul(self, rhs: Money) -> Money {
        self.checked_mul(&rhs).expect("money overflow")
    }
}

impl core::iter::Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |acc, m| acc + m)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<i128, MoneyError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(MoneyError::Malformed(whole.into()));
    }
    s.parse::<i128>().map_err(|_| MoneyError::Overflow)
}

/// Accepts `"3"` or `"5/8"`; decimals are rejected.
impl FromStr for Money {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.split_once('/') {
            Some((n, d)) => Money::new(parse_int(n.trim(), t)?, parse_int(d.trim(), t)?),
            None => Money::new(parse_int(t, t)?, 1),
        }
    }
}

/// A threshold: a finite amount or `Infinity`, which exceeds every amount.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtMoney {
    Finite(Money),
    Infinity,
}

impl ExtMoney {
    pub fn finite(&self) -> Option<Money> {
        match self {
            ExtMoney::Finite(m) => Some(*m),
            ExtMoney::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtMoney::Infinity)
    }

    /// Compares a finite bid against this threshold.
    pub fn cmp_bid(&self, bid: &Money) -> Ordering {
        match self {
            ExtMoney::Finite(t) => t.cmp(bid),
            ExtMoney::Infinity => Ordering::Greater,
        }
    }
}

impl From<Money> for ExtMoney {
    fn from(m: Money) -> Self {
        ExtMoney::Finite(m)
    }
}

impl fmt::Display for ExtMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtMoney::Finite(m) => fmt::Display::fmt(m, f),
            ExtMoney::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtMoney {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(ExtMoney::Infinity),
            other => other.parse().map(ExtMoney::Finite),
        }
    }
}

/// Shorthand for literals in tests and fixtures. Panics on malformed input.
pub fn money(s: &str) -> Money {
    s.parse().expect("valid money literal")
}
