//! Closed intervals with exact rational endpoints.
//!
//! All arithmetic is exact; widening only happens through the explicit
//! outward-rounding helpers (`round_outward`, `sqrt`). Every operation
//! returns an enclosure of the set of results over its operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `2^e` as an exact rational, for any sign of `e`.
pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// `base^e` for an integer base and any sign of exponent.
pub fn pow_signed(base: &BigInt, e: i64) -> BigRational {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Largest dyadic `m / 2^bits` that is `<= x`.
pub fn floor_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let scaled = x.numer() << bits as usize;
    let m = scaled.div_floor(x.denom());
    BigRational::new(m, BigInt::one() << bits as usize)
}

/// Smallest dyadic `m / 2^bits` that is `>= x`.
pub fn ceil_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let scaled = x.numer() << bits as usize;
    let m = -((-scaled).div_floor(x.denom()));
    BigRational::new(m, BigInt::one() << bits as usize)
}

/// Lower bound on `sqrt(x)` with `bits` fractional bits; `x >= 0`.
pub fn sqrt_floor(x: &BigRational, bits: u64) -> BigRational {
    debug_assert!(!x.is_negative());
    // floor(sqrt(x * 4^bits)) / 2^bits, computed via floor(x*4^bits) first.
    let scaled = (x.numer() << (2 * bits) as usize).div_floor(x.denom());
    BigRational::new(scaled.sqrt(), BigInt::one() << bits as usize)
}

/// Upper bound on `sqrt(x)` with `bits` fractional bits; `x >= 0`.
pub fn sqrt_ceil(x: &BigRational, bits: u64) -> BigRational {
    debug_assert!(!x.is_negative());
    let num = x.numer() << (2 * bits) as usize;
    let scaled = -((-num).div_floor(x.denom()));
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1;
    }
    BigRational::new(s, BigInt::one() << bits as usize)
}

/// Floor of log2 |x| for nonzero x.
pub fn floor_log2(x: &BigRational) -> i64 {
    debug_assert!(!x.is_zero());
    let n = x.numer().abs();
    let d = x.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // adjust so that 2^e <= |x| < 2^(e+1)
    let xa = x.abs();
    if pow2(e) > xa {
        e -= 1;
    }
    if pow2(e + 1) <= xa {
        e += 1;
    }
    e
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // fall back to exponent arithmetic for magnitudes beyond f64 range of parts
        if x.is_zero() {
            return 0.0;
        }
        let e = floor_log2(x);
        let m = (x / pow2(e)).to_f64().unwrap_or(1.0);
        m * 2f64.powi(e as i32)
    })
}

/// Natural log of |x| for x nonzero, robust for huge numerators/denominators.
pub fn ln_abs(x: &BigRational) -> f64 {
    let e = floor_log2(x);
    let m = (x.abs() / pow2(e)).to_f64().unwrap_or(1.0);
    m.ln() + e as f64 * std::f64::consts::LN_2
}

pub fn ln_bigint(x: &BigInt) -> f64 {
    ln_abs(&BigRational::from_integer(x.clone()))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Interval::point(int(n))
    }

    pub fn zero() -> Self {
        Interval::point(BigRational::zero())
    }

    pub fn one() -> Self {
        Interval::point(BigRational::one())
    }

    /// Smallest interval containing both endpoints, in either order.
    pub fn hull_of(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Certified `self <= other` for every pair of members.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Three-way comparison that returns `None` when the intervals overlap.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            let m = (-&self.lo).max(self.hi.clone());
            Interval::new(BigRational::zero(), m)
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval::new(&a.lo * &a.lo, &a.hi * &a.hi)
    }

    pub fn pow(&self, e: u32) -> Interval {
        if e.is_multiple_of(2) && e > 0 {
            let a = self.abs();
            return Interval::new(
                num_traits::pow(a.lo.clone(), e as usize),
                num_traits::pow(a.hi.clone(), e as usize),
            );
        }
        // odd powers are monotone
        Interval::new(
            num_traits::pow(self.lo.clone(), e as usize),
            num_traits::pow(self.hi.clone(), e as usize),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        Interval::hull_of(&self.lo * c, &self.hi * c)
    }

    /// Reciprocal of an interval that does not contain zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    /// Widen endpoints outward onto the dyadic grid `2^-bits`.
    pub fn round_outward(&self, bits: u64) -> Interval {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    /// Enclosure of the square root of the nonnegative part of `self`.
    pub fn sqrt(&self, bits: u64) -> Interval {
        let lo = if self.lo.is_positive() {
            sqrt_floor(&self.lo, bits)
        } else {
            BigRational::zero()
        };
        let hi = if self.hi.is_positive() {
            sqrt_ceil(&self.hi, bits)
        } else {
            BigRational::zero()
        };
        Interval::new(lo, hi)
    }

    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else if self.is_point() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_f64_bounds();
        write!(f, "[{lo:e}, {hi:e}]")
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        if self.is_point() {
            return rhs.scale(&self.lo);
        }
        if rhs.is_point() {
            return self.scale(&rhs.lo);
        }
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(int(a), int(b))
    }

    #[test]
    fn mul_mixed_signs() {
        let p = &iv(-2, 3) * &iv(-5, 1);
        assert_eq!(p, iv(-15, 10));
    }

    #[test]
    fn abs_straddling_zero() {
        assert_eq!(iv(-4, 3).abs(), iv(0, 4));
        assert_eq!(iv(-4, -3).abs(), iv(3, 4));
    }

    #[test]
    fn sqrt_encloses() {
        let s = Interval::from_int(2).sqrt(80);
        let sq = s.sqr();
        assert!(sq.contains(&int(2)));
        assert!(s.width() < pow2(-79));
    }

    #[test]
    fn dyadic_rounding_is_outward() {
        let x = rat(1, 3);
        assert!(floor_dyadic(&x, 10) <= x);
        assert!(ceil_dyadic(&x, 10) >= x);
        let y = rat(-1, 3);
        assert!(floor_dyadic(&y, 10) <= y);
        assert!(ceil_dyadic(&y, 10) >= y);
        assert_eq!(floor_dyadic(&rat(3, 4), 2), rat(3, 4));
    }

    #[test]
    fn floor_log2_powers() {
        assert_eq!(floor_log2(&rat(1, 1)), 0);
        assert_eq!(floor_log2(&rat(3, 1)), 1);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        assert_eq!(floor_log2(&rat(-8, 1)), 3);
        assert_eq!(floor_log2(&rat(1, 8)), -3);
    }

    #[test]
    fn even_power_is_tight() {
        assert_eq!(iv(-2, 1).pow(2), iv(0, 4));
        assert_eq!(iv(-2, 1).pow(3), iv(-8, 1));
        assert_eq!(iv(-2, 1).pow(0), iv(1, 1));
    }

    #[test]
    fn compare_decides_disjoint_only() {
        assert_eq!(iv(0, 1).compare(&iv(2, 3)), Some(Ordering::Less));
        assert_eq!(iv(0, 2).compare(&iv(2, 3)), None);
        assert_eq!(iv(2, 2).compare(&iv(2, 2)), Some(Ordering::Equal));
    }
}
