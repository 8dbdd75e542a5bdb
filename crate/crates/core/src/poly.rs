//! Dense integer polynomials, Taylor coefficients at ξ, heights and Mahler measure.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::{int, pow2, Interval};
use crate::roots::RootEnclosure;
use crate::xi::XiSpec;

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        IntPoly::new(vec![c.into()])
    }

    /// `a·T + b`
    pub fn linear(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        IntPoly::new(vec![b.into(), a.into()])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, e: usize) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Largest absolute value of a coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Interval::from_int(c.clone());
        }
        acc
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn residues(&self, m: u32) -> Vec<BigInt> {
        let m = BigInt::from(m);
        self.coeffs.iter().map(|c| c.mod_floor(&m)).collect()
    }

    /// `self ≡ T^d + 2 (mod 4)` coefficient-wise.
    pub fn is_t_pow_plus_two_mod4(&self, d: usize) -> bool {
        if self.degree() != d || self.is_zero() {
            return false;
        }
        let r = self.residues(4);
        r.iter().enumerate().all(|(i, c)| {
            let want = if i == d {
                1
            } else if i == 0 {
                2
            } else {
                0
            };
            // for d = 0 the constant is the leading term; not a valid shape
            d > 0 && *c == BigInt::from(want)
        })
    }

    /// Eisenstein criterion at the prime 2.
    pub fn is_eisenstein_at_2(&self) -> bool {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return false;
        }
        let two = BigInt::from(2);
        let four = BigInt::from(4);
        self.coeffs[d].is_odd()
            && self.coeffs[..d].iter().all(|c| c.is_multiple_of(&two))
            && !self.coeffs[0].is_multiple_of(&four)
    }

    /// `[c0,c1,...]` text form.
    pub fn to_list_string(&self) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", body.join(","))
    }
}

impl FromStr for IntPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("polynomial must look like [c0,c1,...]: '{s}'")))?;
        if inner.trim().is_empty() {
            return Ok(IntPoly::zero());
        }
        let coeffs = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "T")?,
                _ => write!(f, "T^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_util::bigint_vec_str::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::serde_util::bigint_vec_str::deserialize(d).map(IntPoly::new)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Enclosures of `P^[k](ξ) = P^(k)(ξ)/k!` for `k = 0..=upto`.
#[derive(Clone, Debug, PartialEq)]
pub struct DividedDerivatives {
    pub values: Vec<Interval>,
    pub precision_bits: u64,
}

/// Taylor coefficients of `p` at every point of `x`, by repeated synthetic
/// division. Entries past the degree are exact zeros.
pub fn taylor_coefficients(p: &IntPoly, x: &Interval, upto: usize) -> Vec<Interval> {
    let mut c: Vec<Interval> = p
        .coeffs()
        .iter()
        .map(|a| Interval::from_int(a.clone()))
        .collect();
    let m = c.len();
    for i in 0..m.saturating_sub(1) {
        for j in (i..m - 1).rev() {
            let t = x * &c[j + 1];
            c[j] = &c[j] + &t;
        }
    }
    c.resize(upto.max(m.saturating_sub(1)) + 1, Interval::zero());
    c.truncate(upto + 1);
    c
}

pub fn divided_derivatives(
    p: &IntPoly,
    xi: &XiSpec,
    upto: usize,
    precision_bits: u64,
) -> Result<DividedDerivatives> {
    if precision_bits < 64 {
        return Err(Error::InvalidArgument(format!(
            "precision {precision_bits} < 64 bits"
        )));
    }
    let x = xi.enclosure(precision_bits)?;
    Ok(DividedDerivatives {
        values: taylor_coefficients(p, &x, upto),
        precision_bits,
    })
}

/// Coefficient enclosures of `R(T) = P(εT + ξ)` with `ε = 2^eps_log2`.
pub fn taylor_shift_scale(
    p: &IntPoly,
    xi: &XiSpec,
    eps_log2: i64,
    precision_bits: u64,
) -> Result<DividedDerivatives> {
    if eps_log2 > 0 {
        return Err(Error::InvalidArgument("ε must be at most 1".into()));
    }
    let mut d = divided_derivatives(p, xi, p.degree(), precision_bits)?;
    for (k, v) in d.values.iter_mut().enumerate() {
        *v = v.scale(&pow2(eps_log2 * k as i64));
    }
    Ok(d)
}

/// Working precision for constructions at denominator `q`.
pub fn default_precision(n: usize, q: &BigInt) -> u64 {
    64 + 4 * n as u64 * q.bits()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightMeasure {
    pub height: BigInt,
    pub mahler: Interval,
}

impl HeightMeasure {
    /// `M <= (m+1) H` and `H <= 2^m M`, checked on the enclosure.
    pub fn comparison_holds(&self, degree: usize) -> bool {
        let h = BigRational::from_integer(self.height.clone());
        self.mahler.lo() <= &(&h * int(degree as i64 + 1))
            && h <= self.mahler.hi() * pow2(degree as i64)
    }
}

/// Modulus enclosure of a point known to lie in a disk.
pub(crate) fn disk_modulus(r: &RootEnclosure, bits: u64) -> Interval {
    let re = Interval::point(r.re.clone());
    let im = Interval::point(r.im.clone());
    let m = (re.sqr() + im.sqr()).sqrt(bits);
    let lo = (m.lo() - &r.radius).max(BigRational::zero());
    Interval::new(lo, m.hi() + &r.radius)
}

pub fn height_and_mahler(p: &IntPoly, roots: Option<&[RootEnclosure]>) -> Result<HeightMeasure> {
    let height = p.height();
    if p.degree() == 0 {
        return Ok(HeightMeasure {
            mahler: Interval::from_int(height.clone()),
            height,
        });
    }
    let owned;
    let roots = match roots {
        Some(r) => r,
        None => {
            owned = crate::roots::all_roots(p, &crate::roots::default_target_radius(p))?;
            &owned
        }
    };
    if roots.len() != p.degree() {
        return Err(Error::InvalidArgument(format!(
            "{} root enclosures for a degree {} polynomial",
            roots.len(),
            p.degree()
        )));
    }
    let mut m = Interval::from_int(p.leading().abs());
    for r in roots {
        let a = disk_modulus(r, 128).max(&Interval::one());
        m = &m * &a;
    }
    Ok(HeightMeasure { height, mahler: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn products() {
        assert_eq!(&p(&[-1, 1]) * &p(&[-3, 2]), p(&[3, -5, 2]));
        assert_eq!(&p(&[4, 0, 7]) * &IntPoly::one(), p(&[4, 0, 7]));
        assert_eq!(p(&[-1, 1]).pow(2), p(&[1, -2, 1]));
        assert_eq!((&p(&[-1, 1]) * &p(&[-3, 2])).degree(), 2);
        assert!((&p(&[1, 1]) * &IntPoly::zero()).is_zero());
    }

    #[test]
    fn text_forms() {
        let q: IntPoly = "[9,-12,4]".parse().unwrap();
        assert_eq!(q, p(&[9, -12, 4]));
        assert_eq!(q.to_list_string(), "[9,-12,4]");
        assert_eq!(q.to_string(), "4T^2 - 12T + 9");
        assert_eq!(p(&[0, -1]).to_string(), "-T");
        assert_eq!("[1,2,0,0]".parse::<IntPoly>().unwrap().degree(), 1);
        assert!("1,2".parse::<IntPoly>().is_err());
    }

    #[test]
    fn perfect_power_taylor_at_rational_point() {
        // (2T − 3)^n at 3/2: only the top coefficient survives, equal to 2^n
        for n in 1..6usize {
            let f = p(&[-3, 2]).pow(n);
            let t = taylor_coefficients(&f, &Interval::point(rat(3, 2)), n + 2);
            for (k, v) in t.iter().enumerate() {
                let want = if k == n { int(1i64 << n) } else { int(0) };
                assert_eq!(v, &Interval::point(want), "k = {k}");
            }
        }
    }

    #[test]
    fn square_at_sqrt2() {
        let d = divided_derivatives(&p(&[0, 0, 1]), &XiSpec::sqrt(2), 3, 128).unwrap();
        assert!(d.values[0].contains(&int(2)));
        let (lo, hi) = d.values[1].to_f64_bounds();
        assert!((lo - 2.0 * 2f64.sqrt()).abs() < 1e-12 && (hi - lo) < 1e-30);
        assert_eq!(d.values[2], Interval::one());
        assert_eq!(d.values[3], Interval::zero());
    }

    #[test]
    fn constant_divided_derivatives() {
        let d = divided_derivatives(&p(&[7]), &XiSpec::sqrt(2), 1, 64).unwrap();
        assert_eq!(d.values, vec![Interval::from_int(7), Interval::zero()]);
    }

    #[test]
    fn shift_scale_examples() {
        let t = taylor_shift_scale(&p(&[0, 1]), &XiSpec::sqrt(2), -1, 128).unwrap();
        assert!(t.values[0].sqr().contains(&int(2)));
        assert_eq!(t.values[1], Interval::point(rat(1, 2)));

        let t = taylor_shift_scale(&p(&[0, 0, 1]), &XiSpec::sqrt(2), -2, 128).unwrap();
        let (lo, _) = t.values[1].to_f64_bounds();
        assert!((lo - 2.0 * 2f64.sqrt() / 4.0).abs() < 1e-12);
        assert_eq!(t.values[2], Interval::point(rat(1, 16)));

        let a = taylor_shift_scale(&p(&[3, -5, 2]), &XiSpec::sqrt(2), 0, 128).unwrap();
        let b = divided_derivatives(&p(&[3, -5, 2]), &XiSpec::sqrt(2), 2, 128).unwrap();
        assert_eq!(a, b);
        assert!(taylor_shift_scale(&p(&[1]), &XiSpec::sqrt(2), 1, 128).is_err());
    }

    #[test]
    fn heights() {
        assert_eq!(p(&[1, -3, 2]).height(), BigInt::from(3));
        let hm = height_and_mahler(&p(&[-2, 0, 1]), None).unwrap();
        assert!(hm.mahler.contains(&int(2)));
        assert!(hm.comparison_holds(2));
        let hm = height_and_mahler(&p(&[1, 0, 1]), None).unwrap();
        assert!(hm.mahler.contains(&int(1)));
        assert!(hm.comparison_holds(2));
    }

    #[test]
    fn eisenstein_shapes() {
        assert!(p(&[2, 0, 1]).is_eisenstein_at_2());
        assert!(p(&[6, -4, 10, 3]).is_eisenstein_at_2());
        assert!(!p(&[4, 0, 1]).is_eisenstein_at_2());
        assert!(!p(&[2, 1, 1]).is_eisenstein_at_2());
        assert!(p(&[-2, 4, 5]).is_t_pow_plus_two_mod4(2));
        assert!(!p(&[-2, 4, 7]).is_t_pow_plus_two_mod4(2));
        assert!(!p(&[2, 1]).is_t_pow_plus_two_mod4(2));
    }

    #[test]
    fn derivative_and_eval() {
        let f = p(&[1, 2, 3]);
        assert_eq!(f.derivative(), p(&[2, 6]));
        assert_eq!(f.eval_rational(&rat(1, 2)), rat(11, 4));
    }
}
