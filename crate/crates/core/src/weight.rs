//! Exact arithmetic for task and stage weights.
//!
//! [`Rational`] is the general-purpose exact number used at API boundaries
//! (periods, binary-search targets). [`Weight`] is an unreduced fraction with
//! a `+inf` value; it is what the scheduling loops compare, because it never
//! pays for a gcd on construction.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

use crate::error::{input, Result};

pub type Rational = Ratio<i128>;

/// Non-negative extended rational `num / den`; `den == 0` encodes `+inf`.
#[derive(Clone, Copy, Debug)]
pub struct Weight {
    num: i128,
    den: i128,
}

impl Weight {
    pub const ZERO: Weight = Weight { num: 0, den: 1 };
    pub const INFINITY: Weight = Weight { num: 1, den: 0 };

    /// `num / den`. A zero denominator yields `+inf`, matching a stage
    /// evaluated on zero cores.
    #[inline]
    pub fn new(num: i128, den: i128) -> Weight {
        debug_assert!(num >= 0 && den >= 0);
        if den == 0 {
            Weight::INFINITY
        } else {
            Weight { num, den }
        }
    }

    #[inline]
    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn to_rational(self) -> Option<Rational> {
        (!self.is_infinite()).then(|| Ratio::new(self.num, self.den))
    }

    pub fn to_f64(self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl From<Rational> for Weight {
    fn from(r: Rational) -> Weight {
        assert!(!r.is_negative(), "weights are non-negative");
        Weight::new(*r.numer(), *r.denom())
    }
}

impl From<&Rational> for Weight {
    fn from(r: &Rational) -> Weight {
        Weight::from(*r)
    }
}

impl Ord for Weight {
    #[inline]
    fn cmp(&self, other: &Weight) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.num * other.den).cmp(&(other.num * self.den)),
        }
    }
}

impl PartialOrd for Weight {
    #[inline]
    fn partial_cmp(&self, other: &Weight) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Weight {
    #[inline]
    fn eq(&self, other: &Weight) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Weight {}

impl PartialEq<Rational> for Weight {
    fn eq(&self, other: &Rational) -> bool {
        *self == Weight::from(other)
    }
}

impl PartialOrd<Rational> for Weight {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(&Weight::from(other)))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            None => f.write_str("inf"),
            Some(r) => write!(f, "{r}"),
        }
    }
}

/// Converts a JSON number into the exact decimal it denotes.
///
/// `f64`'s `Display` prints the shortest string that round-trips, so `193.4`
/// becomes exactly `1934/10` rather than the nearest binary fraction.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return input(format!("non-finite number {x}"));
    }
    parse_decimal(&format!("{x}"))
}

/// Parses a plain decimal literal such as `-12`, `7027.0` or `0.125`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return input(format!("not a decimal number: {s:?}"));
    }
    if int_part.len() + frac_part.len() > 30 {
        return input(format!("too many digits: {s:?}"));
    }
    let mut num: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        num = num * 10 + i128::from(b - b'0');
    }
    let den = 10i128.pow(frac_part.len() as u32);
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact `ceil(r)` for a non-negative rational.
pub fn ceil_to_u64(r: &Rational) -> u64 {
    debug_assert!(!r.is_negative());
    let c = r.ceil();
    c.to_integer().to_u64().unwrap_or(u64::MAX)
}
