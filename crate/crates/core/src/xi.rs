//! Descriptions of the target real number and certified enclosures of it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{pow2, sqrt_ceil, sqrt_floor, Interval};

/// Minimum declared precision for decimal input.
pub const MIN_DECIMAL_BITS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSign {
    Plus,
    Minus,
}

/// The real number being approximated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiSpec {
    /// The real root `(-b ± sqrt(b²-4ac)) / 2a` of `aT² + bT + c`.
    Quadratic {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        root: RootSign,
    },
    /// `[preperiod; (period)]`; an empty period makes the expansion finite.
    PartialQuotients {
        preperiod: Vec<BigInt>,
        period: Vec<BigInt>,
    },
    /// A decimal value known to within `2^-bits`.
    DecimalStream {
        digits: String,
        value: BigRational,
        bits: u64,
    },
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

impl XiSpec {
    pub fn sqrt(d: i64) -> Self {
        XiSpec::Quadratic {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::from(-d),
            root: RootSign::Plus,
        }
    }

    pub fn quadratic(a: i64, b: i64, c: i64, root: RootSign) -> Self {
        XiSpec::Quadratic {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            root,
        }
    }

    pub fn golden_ratio() -> Self {
        XiSpec::PartialQuotients {
            preperiod: vec![BigInt::one()],
            period: vec![BigInt::one()],
        }
    }

    pub fn periodic(preperiod: &[i64], period: &[i64]) -> Self {
        XiSpec::PartialQuotients {
            preperiod: preperiod.iter().map(|&x| x.into()).collect(),
            period: period.iter().map(|&x| x.into()).collect(),
        }
    }

    pub fn decimal(digits: &str, bits: u64) -> Result<Self> {
        let value = parse_decimal(digits)?;
        let xi = XiSpec::DecimalStream {
            digits: digits.to_string(),
            value,
            bits,
        };
        xi.validate()?;
        Ok(xi)
    }

    /// Check the variant invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            XiSpec::Quadratic { a, b, c, .. } => {
                if a.is_zero() {
                    return Err(Error::InvalidXi("leading coefficient is zero".into()));
                }
                let disc = b * b - BigInt::from(4) * a * c;
                if !disc.is_positive() {
                    return Err(Error::InvalidXi(format!(
                        "discriminant {disc} is not positive, no real root"
                    )));
                }
                if is_perfect_square(&disc) {
                    return Err(Error::RationalInput(format!(
                        "discriminant {disc} is a perfect square"
                    )));
                }
                Ok(())
            }
            XiSpec::PartialQuotients { preperiod, period } => {
                if preperiod.is_empty() && period.is_empty() {
                    return Err(Error::InvalidXi("no partial quotients".into()));
                }
                let first_period_pos = preperiod.len();
                for (i, a) in preperiod.iter().enumerate() {
                    if i > 0 && a < &BigInt::one() {
                        return Err(Error::InvalidXi(format!(
                            "partial quotient a{i} = {a} must be >= 1"
                        )));
                    }
                }
                for (j, a) in period.iter().enumerate() {
                    if first_period_pos + j > 0 && a < &BigInt::one() {
                        return Err(Error::InvalidXi(format!(
                            "periodic partial quotient {a} must be >= 1"
                        )));
                    }
                }
                if preperiod.is_empty() && period.iter().any(|a| a < &BigInt::one()) {
                    return Err(Error::InvalidXi(
                        "purely periodic quotients must all be >= 1".into(),
                    ));
                }
                Ok(())
            }
            XiSpec::DecimalStream { bits, .. } => {
                if *bits < MIN_DECIMAL_BITS {
                    return Err(Error::InvalidXi(format!(
                        "declared precision {bits} < {MIN_DECIMAL_BITS} bits"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Integer minimal-polynomial coefficients `(a, b, c)` when ξ is given as a quadratic.
    pub fn quadratic_coefficients(&self) -> Option<(BigInt, BigInt, BigInt)> {
        match self {
            XiSpec::Quadratic { a, b, c, .. } => Some((a.clone(), b.clone(), c.clone())),
            _ => None,
        }
    }

    /// `(P, Q, D)` with ξ = (P + √D)/Q and Q | D − P².
    pub(crate) fn surd_triple(&self) -> Option<(BigInt, BigInt, BigInt)> {
        match self {
            XiSpec::Quadratic { a, b, c, root } => {
                let d = b * b - BigInt::from(4) * a * c;
                let two_a = BigInt::from(2) * a;
                Some(match root {
                    RootSign::Plus => (-b, two_a, d),
                    RootSign::Minus => (b.clone(), -two_a, d),
                })
            }
            _ => None,
        }
    }

    /// Enclosure of ξ of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u64) -> Result<Interval> {
        self.validate()?;
        match self {
            XiSpec::Quadratic { .. } => {
                let (p, q, d) = self.surd_triple().unwrap();
                Ok(surd_enclosure(&p, &q, &d, bits + 2, false))
            }
            XiSpec::PartialQuotients { period, .. } if period.is_empty() => {
                Ok(Interval::point(self.finite_value()))
            }
            XiSpec::PartialQuotients { .. } => {
                let target = pow2(-(bits as i64) - 1);
                let mut it = crate::cf::ConvergentIter::new(self.clone());
                let mut prev = it.next().expect("nonempty expansion")?;
                loop {
                    let cur = it.next().expect("periodic expansion is infinite")?;
                    let gap = BigRational::new(BigInt::one(), &prev.q * &cur.q);
                    if gap <= target {
                        let a = BigRational::new(prev.p.clone(), prev.q.clone());
                        let b = BigRational::new(cur.p.clone(), cur.q.clone());
                        let h = Interval::hull_of(a, b);
                        return Ok(h.round_outward(bits + 4));
                    }
                    prev = cur;
                }
            }
            XiSpec::DecimalStream {
                value,
                bits: declared,
                ..
            } => {
                if bits > *declared {
                    return Err(Error::precision(
                        format!("decimal input only certifies {declared} bits"),
                        bits,
                    ));
                }
                let r = pow2(-(*declared as i64));
                Ok(Interval::new(value - &r, value + &r))
            }
        }
    }

    /// Enclosure of the other real root of a quadratic ξ.
    pub fn conjugate_enclosure(&self, bits: u64) -> Option<Interval> {
        let (p, q, d) = self.surd_triple()?;
        Some(surd_enclosure(&p, &q, &d, bits + 2, true))
    }

    /// The exact value when ξ is given by a terminating expansion.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            XiSpec::PartialQuotients { period, .. } if period.is_empty() => {
                Some(self.finite_value())
            }
            _ => None,
        }
    }

    fn finite_value(&self) -> BigRational {
        match self {
            XiSpec::PartialQuotients { preperiod, .. } => {
                let mut it = preperiod.iter().rev();
                let mut acc = BigRational::from_integer(it.next().unwrap().clone());
                for a in it {
                    acc = BigRational::from_integer(a.clone()) + acc.recip();
                }
                acc
            }
            _ => unreachable!(),
        }
    }

    /// Periodic descriptions (and quadratic surds) have bounded partial quotients.
    /// Largest precision `enclosure` can deliver, if bounded.
    pub fn precision_cap(&self) -> Option<u64> {
        match self {
            XiSpec::DecimalStream { bits, .. } => Some(*bits),
            _ => None,
        }
    }

    /// `enclosure` at `bits`, or at the cap when `bits` exceeds it.
    pub fn enclosure_capped(&self, bits: u64) -> Result<Interval> {
        self.enclosure(self.precision_cap().map_or(bits, |c| c.min(bits)))
    }

    pub fn is_eventually_periodic(&self) -> bool {
        match self {
            XiSpec::Quadratic { .. } => true,
            XiSpec::PartialQuotients { period, .. } => !period.is_empty(),
            XiSpec::DecimalStream { .. } => false,
        }
    }
}

/// Encloses `(p ± √d)/q`.
fn surd_enclosure(p: &BigInt, q: &BigInt, d: &BigInt, bits: u64, conj: bool) -> Interval {
    let dr = BigRational::from_integer(d.clone());
    let s = Interval::new(sqrt_floor(&dr, bits), sqrt_ceil(&dr, bits));
    let s = if conj { -s } else { s };
    let num = &Interval::from_int(p.clone()) + &s;
    num.scale(&BigRational::new(BigInt::one(), q.clone()))
        .round_outward(bits)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return Err(Error::Parse(format!("empty decimal '{s}'")));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid decimal digits '{s}'")));
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| Error::Parse(s.to_string()))?
    };
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let v = BigRational::new(n, den);
    Ok(if neg { -v } else { v })
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid integer '{s}'")))
}

impl FromStr for XiSpec {
    type Err = Error;

    /// Accepts `sqrt:D`, `quadratic:a,b,c[:root=+|-]`, `cf:a0,a1,...[(period)]`
    /// and `dec:<digits>:<bits>`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in '{s}'")))?;
        let xi = match tag {
            "sqrt" => XiSpec::Quadratic {
                a: BigInt::one(),
                b: BigInt::zero(),
                c: -parse_int(rest)?,
                root: RootSign::Plus,
            },
            "quadratic" => {
                let (coeffs, root) = match rest.split_once(':') {
                    Some((c, r)) => {
                        let root = match r.trim() {
                            "root=+" => RootSign::Plus,
                            "root=-" => RootSign::Minus,
                            other => {
                                return Err(Error::Parse(format!("bad root selector '{other}'")))
                            }
                        };
                        (c, root)
                    }
                    None => (rest, RootSign::Plus),
                };
                let parts: Vec<&str> = coeffs.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!(
                        "quadratic needs 3 coefficients, got '{coeffs}'"
                    )));
                }
                XiSpec::Quadratic {
                    a: parse_int(parts[0])?,
                    b: parse_int(parts[1])?,
                    c: parse_int(parts[2])?,
                    root,
                }
            }
            "cf" => {
                let (pre, per) = match rest.find('(') {
                    Some(i) => {
                        let tail = &rest[i + 1..];
                        let tail = tail
                            .strip_suffix(')')
                            .ok_or_else(|| Error::Parse(format!("unclosed period in '{s}'")))?;
                        (&rest[..i], Some(tail))
                    }
                    None => (rest, None),
                };
                let list = |t: &str| -> Result<Vec<BigInt>> {
                    t.split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(parse_int)
                        .collect()
                };
                let preperiod = list(pre)?;
                let period = match per {
                    Some(p) => {
                        let v = list(p)?;
                        if v.is_empty() {
                            return Err(Error::InvalidXi("empty period '()'".into()));
                        }
                        v
                    }
                    None => Vec::new(),
                };
                XiSpec::PartialQuotients { preperiod, period }
            }
            "dec" => {
                let (digits, bits) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("dec needs ':<bits>' in '{s}'")))?;
                let bits: u64 = bits
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid bit count '{bits}'")))?;
                XiSpec::DecimalStream {
                    digits: digits.to_string(),
                    value: parse_decimal(digits)?,
                    bits,
                }
            }
            other => return Err(Error::Parse(format!("unknown number kind '{other}'"))),
        };
        xi.validate()?;
        Ok(xi)
    }
}

impl fmt::Display for XiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiSpec::Quadratic { a, b, c, root } => {
                if a.is_one() && b.is_zero() && *root == RootSign::Plus {
                    write!(f, "sqrt:{}", -c)
                } else {
                    let r = match root {
                        RootSign::Plus => '+',
                        RootSign::Minus => '-',
                    };
                    write!(f, "quadratic:{a},{b},{c}:root={r}")
                }
            }
            XiSpec::PartialQuotients { preperiod, period } => {
                let pre: Vec<String> = preperiod.iter().map(|x| x.to_string()).collect();
                write!(f, "cf:{}", pre.join(","))?;
                if !period.is_empty() {
                    let per: Vec<String> = period.iter().map(|x| x.to_string()).collect();
                    if !preperiod.is_empty() {
                        write!(f, ",")?;
                    }
                    write!(f, "({})", per.join(","))?;
                }
                Ok(())
            }
            XiSpec::DecimalStream { digits, bits, .. } => write!(f, "dec:{digits}:{bits}"),
        }
    }
}

/// Floor of an interval when it is certified constant over the interval.
pub(crate) fn certified_floor(x: &Interval) -> Option<BigInt> {
    let lo = x.lo().floor().to_integer();
    let hi = x.hi().floor().to_integer();
    (lo == hi).then_some(lo)
}
