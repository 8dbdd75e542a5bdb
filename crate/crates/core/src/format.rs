//! Decimal rendering of exact rationals and intervals for JSON/CSV output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::interval::{floor_log2, Interval};

/// Significant digits used in all serialized decimals.
pub const OUTPUT_DIGITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

fn pow10(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::from(1), p)
    }
}

/// Scientific notation with `digits` significant digits, rounded as asked
/// (toward −∞ for `Down`, toward +∞ for `Up`).
pub fn sci(x: &BigRational, digits: usize, mode: Rounding) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // magnitude rounding direction flips for negative values
    let mag_mode = match (mode, neg) {
        (Rounding::Down, true) => Rounding::Up,
        (Rounding::Up, true) => Rounding::Down,
        (m, _) => m,
    };
    let mut e10 = (floor_log2(&a) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10(e10 + 1) <= a {
        e10 += 1;
    }
    while pow10(e10) > a {
        e10 -= 1;
    }
    let shift = digits as i64 - 1 - e10;
    let scaled = &a * pow10(shift);
    let mut m = match mag_mode {
        Rounding::Down => scaled.floor().to_integer(),
        Rounding::Up => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let limit = num_traits::pow(BigInt::from(10), digits);
    if m >= limit {
        m = m.div_floor(&BigInt::from(10));
        e10 += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

pub fn sci_nearest(x: &BigRational) -> String {
    sci(x, OUTPUT_DIGITS, Rounding::Nearest)
}

/// Outward-rounded `[lo, hi]` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalText {
    pub lo: String,
    pub hi: String,
}

impl From<&Interval> for IntervalText {
    fn from(iv: &Interval) -> Self {
        IntervalText {
            lo: sci(iv.lo(), OUTPUT_DIGITS, Rounding::Down),
            hi: sci(iv.hi(), OUTPUT_DIGITS, Rounding::Up),
        }
    }
}

/// Formats an `f64` observed constant deterministically.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        x.to_string()
    }
}
