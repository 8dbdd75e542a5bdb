//! Continued-fraction expansion of ξ and its convergents.
//!
//! Quadratic surds expand through the exact `(P + √D)/Q` recurrence, explicit
//! quotient lists are replayed, and decimal inputs are expanded by interval
//! steps that only emit a quotient when its floor is certified.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::serde_util::bigint_str;
use crate::xi::{certified_floor, XiSpec};

/// One convergent `p/q` of ξ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    #[serde(with = "bigint_str")]
    pub p: BigInt,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    pub index: usize,
}

impl Convergent {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, index: usize) -> Self {
        Convergent {
            p: p.into(),
            q: q.into(),
            index,
        }
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

enum QuotientState {
    Surd {
        p: BigInt,
        q: BigInt,
        d: BigInt,
        sqrt_d: BigInt,
    },
    Listed {
        preperiod: Vec<BigInt>,
        period: Vec<BigInt>,
        pos: usize,
    },
    Decimal {
        x: Interval,
        bits: u64,
        done: bool,
    },
}

/// Partial quotients `a0, a1, ...` of ξ.
pub struct QuotientStream {
    state: QuotientState,
}

impl QuotientStream {
    pub fn new(xi: &XiSpec) -> Result<Self> {
        xi.validate()?;
        let state = match xi {
            XiSpec::Quadratic { .. } => {
                let (p, q, d) = xi.surd_triple().unwrap();
                let sqrt_d = d.sqrt();
                QuotientState::Surd { p, q, d, sqrt_d }
            }
            XiSpec::PartialQuotients { preperiod, period } => QuotientState::Listed {
                preperiod: preperiod.clone(),
                period: period.clone(),
                pos: 0,
            },
            XiSpec::DecimalStream { bits, .. } => QuotientState::Decimal {
                x: xi.enclosure(*bits)?,
                bits: *bits,
                done: false,
            },
        };
        Ok(QuotientStream { state })
    }
}

impl Iterator for QuotientStream {
    type Item = Result<BigInt>;

    fn next(&mut self) -> Option<Result<BigInt>> {
        match &mut self.state {
            QuotientState::Surd { p, q, d, sqrt_d } => {
                // floor((p + √d)/q) with √d irrational
                let a = if q.is_positive() {
                    (&*p + &*sqrt_d).div_floor(q)
                } else {
                    (-&*p - &*sqrt_d - BigInt::one()).div_floor(&-&*q)
                };
                let p_next = &a * &*q - &*p;
                let q_next = (&*d - &p_next * &p_next) / &*q;
                *p = p_next;
                *q = q_next;
                Some(Ok(a))
            }
            QuotientState::Listed {
                preperiod,
                period,
                pos,
            } => {
                let i = *pos;
                *pos += 1;
                if i < preperiod.len() {
                    Some(Ok(preperiod[i].clone()))
                } else if period.is_empty() {
                    None
                } else {
                    Some(Ok(period[(i - preperiod.len()) % period.len()].clone()))
                }
            }
            QuotientState::Decimal { x, bits, done } => {
                if *done {
                    return None;
                }
                let Some(a) = certified_floor(x) else {
                    *done = true;
                    return Some(Err(Error::precision(
                        "decimal input cannot certify the next partial quotient",
                        *bits,
                    )));
                };
                let frac = &*x - &Interval::from_int(a.clone());
                if frac.is_point() && frac.lo().is_zero() {
                    // exact rational: this is the last quotient
                    *done = true;
                    return Some(Ok(a));
                }
                match frac.recip() {
                    Some(r) if frac.lo().is_positive() => *x = r,
                    _ => {
                        *done = true;
                        return Some(Err(Error::precision(
                            "decimal input cannot certify the next partial quotient",
                            *bits,
                        )));
                    }
                }
                Some(Ok(a))
            }
        }
    }
}

/// Convergents `p_k/q_k` in index order.
pub struct ConvergentIter {
    quotients: Option<QuotientStream>,
    error: Option<Error>,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    index: usize,
}

impl ConvergentIter {
    pub fn new(xi: XiSpec) -> Self {
        let (quotients, error) = match QuotientStream::new(&xi) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e)),
        };
        ConvergentIter {
            quotients,
            error,
            // (p_{k-1}, p_{k-2})
            p: (BigInt::one(), BigInt::zero()),
            q: (BigInt::zero(), BigInt::one()),
            index: 0,
        }
    }
}

impl Iterator for ConvergentIter {
    type Item = Result<Convergent>;

    fn next(&mut self) -> Option<Result<Convergent>> {
        if let Some(e) = self.error.take() {
            return Some(Err(e));
        }
        let a = match self.quotients.as_mut()?.next()? {
            Ok(a) => a,
            Err(e) => {
                self.quotients = None;
                return Some(Err(e));
            }
        };
        let p = &a * &self.p.0 + &self.p.1;
        let q = &a * &self.q.0 + &self.q.1;
        self.p = (p.clone(), std::mem::take(&mut self.p.0));
        self.q = (q.clone(), std::mem::take(&mut self.q.0));
        let c = Convergent {
            p,
            q,
            index: self.index,
        };
        self.index += 1;
        Some(Ok(c))
    }
}

/// The first `count` convergents of ξ.
pub fn convergents(xi: &XiSpec, count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    let mut out = Vec::with_capacity(count);
    for c in ConvergentIter::new(xi.clone()).take(count) {
        out.push(c?);
    }
    if out.len() < count {
        return Err(Error::RationalInput(format!(
            "continued fraction of {xi} terminates after {} terms",
            out.len()
        )));
    }
    Ok(out)
}

/// The convergent at `index` and its predecessor; `None` stands for the unit
/// marker at index 0 (where the previous linear form is the constant 1).
pub fn previous_convergent_pair(
    xi: &XiSpec,
    index: usize,
) -> Result<(Convergent, Option<Convergent>)> {
    let mut cs = convergents(xi, index + 1)?;
    let cur = cs.pop().unwrap();
    Ok((cur, cs.pop()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "decision")]
pub enum BadlyApproximable {
    Yes,
    No,
    Unknown {
        #[serde(with = "bigint_str")]
        max_seen: BigInt,
    },
}

/// Quotient budget when scanning a non-periodic description.
const SCAN_LIMIT: usize = 10_000;

pub fn is_badly_approximable(xi: &XiSpec) -> BadlyApproximable {
    if xi.is_eventually_periodic() {
        return BadlyApproximable::Yes;
    }
    let mut max_seen = BigInt::zero();
    if let Ok(stream) = QuotientStream::new(xi) {
        for a in stream.skip(1).take(SCAN_LIMIT) {
            match a {
                Ok(a) => max_seen = max_seen.max(a),
                Err(_) => break,
            }
        }
    }
    BadlyApproximable::Unknown { max_seen }
}

/// `p·q0 − p0·q` for two convergents.
pub fn determinant(cur: &Convergent, prev: &Convergent) -> BigInt {
    &cur.p * &prev.q - &prev.p * &cur.q
}
