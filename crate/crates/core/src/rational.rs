//! Exact rational scalar used for every time, position and game value.
//!
//! Backed by `num_rational::Ratio<i128>`; every operation is checked and
//! panics on overflow instead of wrapping. Values are always kept in lowest
//! terms with a positive denominator.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number literal")]
    Empty,
    #[error("scientific notation is not accepted: {0:?}")]
    Scientific(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed number literal {0:?}")]
    Malformed(String),
    #[error("number literal {0:?} does not fit in 128-bit rationals")]
    Overflow(String),
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics if `den` is zero.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
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

    pub fn is_integer(&self) -> bool {
        self.denom() == 1
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self.numer().cmp(&0) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn halve(&self) -> Self {
        *self / Rational::from_integer(2)
    }

    pub fn checked_add(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_add(&rhs.0).map(Rational)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_sub(&rhs.0).map(Rational)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_mul(&rhs.0).map(Rational)
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        self.0.checked_div(&rhs.0).map(Rational)
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Decimal rendering rounded half away from zero to `places` digits.
    /// Display only; nothing downstream parses it back.
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = 10i128
            .checked_pow(places)
            .expect("too many decimal places");
        let num = self.numer();
        let den = self.denom();
        let negative = num < 0;
        let n = num.unsigned_abs();
        let d = den as u128;
        let int_part = n / d;
        let rem = n % d;
        let scaled = rem
            .checked_mul(scale as u128)
            .expect("decimal rendering overflow");
        let (mut frac, frac_rem) = scaled.div_rem(&d);
        let mut int_part = int_part;
        if frac_rem * 2 >= d {
            frac += 1;
            if frac == scale as u128 {
                frac = 0;
                int_part += 1;
            }
        }
        let sign = if negative && (int_part != 0 || frac != 0) {
            "-"
        } else {
            ""
        };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{frac:0width$}",
                width = places as usize
            )
        }
    }

    fn parse_decimal(s: &str) -> Result<Self, ParseRationalError> {
        let overflow = || ParseRationalError::Overflow(s.to_string());
        let malformed = || ParseRationalError::Malformed(s.to_string());
        let (negative, body) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_digits, frac_digits) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(malformed());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_digits) || !all_digits(frac_digits) {
            return Err(malformed());
        }
        let mut num: i128 = 0;
        for b in int_digits.bytes().chain(frac_digits.bytes()) {
            num = num
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as i128))
                .ok_or_else(overflow)?;
        }
        let den = 10i128
            .checked_pow(frac_digits.len() as u32)
            .ok_or_else(overflow)?;
        let num = if negative { -num } else { num };
        Ok(Rational::new(num, den))
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers, plain decimals (`3.99968`) and fractions (`p/q`,
    /// either side possibly a decimal). Decimals convert exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if s.contains(['e', 'E']) {
            return Err(ParseRationalError::Scientific(s.to_string()));
        }
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim();
                let d = d.trim();
                if n.is_empty() || d.is_empty() || d.contains('/') {
                    return Err(ParseRationalError::Malformed(s.to_string()));
                }
                let n = Rational::parse_decimal(n)?;
                let d = Rational::parse_decimal(d)?;
                if d.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                n.checked_div(&d)
                    .ok_or_else(|| ParseRationalError::Overflow(s.to_string()))
            }
            None => Rational::parse_decimal(s),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i128)
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:literal) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(&rhs).expect(concat!("rational ", $what))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                self.$checked(rhs).expect(concat!("rational ", $what))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(&rhs).expect(concat!("rational ", $what))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                self.$checked(rhs).expect(concat!("rational ", $what))
            }
        }
    };
}

checked_binop!(Add, add, checked_add, "addition overflow");
checked_binop!(Sub, sub, checked_sub, "subtraction overflow");
checked_binop!(Mul, mul, checked_mul, "multiplication overflow");
checked_binop!(Div, div, checked_div, "division by zero or overflow");

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational::ZERO - self
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + *b)
    }
}

/// Shorthand for building literals in code and tests: `q(21, 16)`.
pub fn q(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}
