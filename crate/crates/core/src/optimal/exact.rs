//! Nonnegative exact rationals over big integers.
//!
//! Dyadic values (power-of-two denominators) are kept reduced by shifting
//! alone, which keeps the threshold recursion cheap; other denominators fall
//! back to gcd reduction.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::money::Money;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exact {
    numer: BigUint,
    denom: BigUint,
}

fn is_pow2(x: &BigUint) -> bool {
    x.count_ones() == 1
}

impl Exact {
    pub fn zero() -> Self {
        Exact {
            numer: BigUint::zero(),
            denom: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Exact::from_integer(1)
    }

    pub fn from_integer(n: u64) -> Self {
        Exact {
            numer: BigUint::from(n),
            denom: BigUint::one(),
        }
    }

    /// `None` if `denom` is zero.
    pub fn new(numer: BigUint, denom: BigUint) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        Some(Exact { numer, denom }.normalized())
    }

    pub fn ratio(numer: u64, denom: u64) -> Option<Self> {
        Exact::new(BigUint::from(numer), BigUint::from(denom))
    }

    /// `numer / 2^exp`.
    pub fn dyadic(numer: BigUint, exp: u64) -> Self {
        Exact {
            numer,
            denom: BigUint::one() << exp,
        }
        .normalized()
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_dyadic(&self) -> bool {
        is_pow2(&self.denom)
    }

    fn normalized(mut self) -> Self {
        if self.numer.is_zero() {
            self.denom = BigUint::one();
            return self;
        }
        if is_pow2(&self.denom) {
            let tz = self.numer.trailing_zeros().unwrap_or(0);
            let dz = self.denom.trailing_zeros().unwrap_or(0);
            let s = tz.min(dz);
            if s > 0 {
                self.numer >>= s;
                self.denom >>= s;
            }
        } else {
            let g = self.numer.gcd(&self.denom);
            if !g.is_one() {
                self.numer /= &g;
                self.denom /= &g;
            }
        }
        self
    }

    /// `1 - self`, or `None` when `self > 1`.
    pub fn one_minus(&self) -> Option<Exact> {
        if self.numer > self.denom {
            return None;
        }
        Some(
            Exact {
                numer: &self.denom - &self.numer,
                denom: self.denom.clone(),
            }
            .normalized(),
        )
    }

    /// `self - other`, or `None` when negative.
    pub fn checked_sub(&self, other: &Exact) -> Option<Exact> {
        let a = &self.numer * &other.denom;
        let b = &other.numer * &self.denom;
        if a < b {
            return None;
        }
        Exact::new(a - b, &self.denom * &other.denom)
    }

    pub fn pow(&self, exp: u32) -> Exact {
        let mut out = Exact::one();
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    /// Nearest value with denominator `2^bits` (ties round up).
    pub fn round_dyadic(&self, bits: u64) -> Exact {
        let scaled = (&self.numer << bits) + (&self.denom >> 1u32);
        Exact::dyadic(scaled / &self.denom, bits)
    }

    pub fn to_f64(&self) -> f64 {
        if self.numer.is_zero() {
            return 0.0;
        }
        // Keep about 64 significant bits in the quotient.
        let shift = 64 + self.denom.bits() as i64 - self.numer.bits() as i64;
        let q = if shift >= 0 {
            (&self.numer << shift as u64) / &self.denom
        } else {
            &self.numer / (&self.denom << (-shift) as u64)
        };
        let digits = q.to_u64_digits();
        let mut m = 0.0f64;
        for d in digits.iter().rev() {
            m = m * 18446744073709551616.0 + *d as f64;
        }
        libm::ldexp(m, -(shift as i32))
    }

    /// Truncated decimal expansion with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let int = &self.numer / &self.denom;
        let mut rem = &self.numer % &self.denom;
        let mut s = alloc::format!("{int}");
        if digits > 0 {
            s.push('.');
            let ten = BigUint::from(10u32);
            for _ in 0..digits {
                rem *= &ten;
                let d = &rem / &self.denom;
                rem %= &self.denom;
                s.push(char::from(b'0' + d.to_u64_digits().first().copied().unwrap_or(0) as u8));
            }
        }
        s
    }
}

impl From<Money> for Exact {
    fn from(m: Money) -> Self {
        let r = m.as_ratio();
        Exact::new(
            BigUint::from(*r.numer() as u128),
            BigUint::from(*r.denom() as u128),
        )
        .expect("money has a positive denominator")
    }
}

impl<'a> Add<&'a Exact> for &'a Exact {
    type Output = Exact;

    fn add(self, rhs: &Exact) -> Exact {
        if is_pow2(&self.denom) && is_pow2(&rhs.denom) {
            let (big, small) = if self.denom >= rhs.denom {
                (self, rhs)
            } else {
                (rhs, self)
            };
            let shift = big.denom.bits() - small.denom.bits();
            return Exact {
                numer: &big.numer + (&small.numer << shift),
                denom: big.denom.clone(),
            }
            .normalized();
        }
        Exact {
            numer: &self.numer * &rhs.denom + &rhs.numer * &self.denom,
            denom: &self.denom * &rhs.denom,
        }
        .normalized()
    }
}

impl<'a> Mul<&'a Exact> for &'a Exact {
    type Output = Exact;

    fn mul(self, rhs: &Exact) -> Exact {
        Exact {
            numer: &self.numer * &rhs.numer,
            denom: &self.denom * &rhs.denom,
        }
        .normalized()
    }
}

impl Add for Exact {
    type Output = Exact;

    fn add(self, rhs: Exact) -> Exact {
        &self + &rhs
    }
}

impl Mul for Exact {
    type Output = Exact;

    fn mul(self, rhs: Exact) -> Exact {
        &self * &rhs
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.numer * &other.denom).cmp(&(&other.numer * &self.denom))
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.bits() > 128 {
            write!(f, "~{} ({}-bit denominator)", self.to_decimal(20), self.denom.bits())
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

/// Parses `"a/b"` or an integer.
impl core::str::FromStr for Exact {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let parse = |t: &str| t.trim().parse::<BigUint>().map_err(|_| ());
        match s.split_once('/') {
            Some((a, b)) => Exact::new(parse(a)?, parse(b)?).ok_or(()),
            None => Ok(Exact {
                numer: parse(s)?,
                denom: BigUint::one(),
            }),
        }
    }
}
