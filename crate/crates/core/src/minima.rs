//! Exhaustive search for small integer polynomials in the convex body
//! `C(q) = { P : |P^[k](ξ)| <= q^(2k−n), 0 <= k <= n }`.
//!
//! Points are enumerated triangularly in Taylor coordinates at ξ: the top
//! coefficient is the top divided derivative, and each lower coefficient is
//! confined to an interval once the higher ones are fixed. Arithmetic is
//! fixed point in `i128` with directed rounding, so the candidate set is a
//! certified superset of the lattice points in `Λ·C(q)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::cf::ConvergentIter;
use crate::constructor::build_basis;
use crate::error::{Error, Result};
use crate::interval::{int, pow2, pow_signed};
use crate::xi::XiSpec;

pub const MAX_N: usize = 3;
pub const MAX_Q: u64 = 8;
const FRAC: i64 = 60;

/// `1 / (2^(n^2) (n+1)!)`
pub fn lambda0(n: usize) -> BigRational {
    let fact: BigInt = (1..=n as u64 + 1).map(BigInt::from).product();
    BigRational::new(BigInt::one(), (BigInt::one() << (n * n)) * fact)
}

fn floor_fixed(x: &BigRational) -> i128 {
    (x * pow2(FRAC))
        .floor()
        .to_integer()
        .to_i128()
        .expect("fixed-point range")
}

fn ceil_fixed(x: &BigRational) -> i128 {
    (x * pow2(FRAC))
        .ceil()
        .to_integer()
        .to_i128()
        .expect("fixed-point range")
}

fn div_floor(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

fn binom(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Fixed-point data for one `(ξ, n, q)`.
struct Body {
    n: usize,
    /// `[floor, ceil]` of `ξ^j · 2^FRAC`
    pow_lo: Vec<i128>,
    pow_hi: Vec<i128>,
    /// `q^(2k−n)` exact
    scale: Vec<BigRational>,
}

/// Certified fixed-point enclosure `[lo, hi]` of one Taylor coordinate.
#[derive(Clone, Copy, Debug)]
struct Coord {
    lo: i128,
    hi: i128,
}

impl Coord {
    fn abs_lo(&self) -> i128 {
        if self.lo > 0 {
            self.lo
        } else if self.hi < 0 {
            -self.hi
        } else {
            0
        }
    }

    fn abs_hi(&self) -> i128 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl Body {
    fn new(xi: &XiSpec, n: usize, q: u64) -> Result<Body> {
        let x = xi.enclosure_capped(128)?;
        if x.abs().hi() > &int(1024) {
            return Err(Error::InvalidArgument("probe needs |ξ| <= 1024".into()));
        }
        let mut pow_lo = Vec::new();
        let mut pow_hi = Vec::new();
        for j in 0..=n {
            let p = x.pow(j as u32);
            pow_lo.push(floor_fixed(p.lo()));
            pow_hi.push(ceil_fixed(p.hi()));
        }
        let qb = BigInt::from(q);
        let scale = (0..=n)
            .map(|k| pow_signed(&qb, 2 * k as i64 - n as i64))
            .collect();
        Ok(Body {
            n,
            pow_lo,
            pow_hi,
            scale,
        })
    }

    /// Enclosure of `Σ_{i>k} a_i C(i,k) ξ^(i−k)`.
    fn tail(&self, a: &[i64], k: usize) -> Coord {
        let (mut lo, mut hi) = (0i128, 0i128);
        for (i, &ai) in a.iter().enumerate().skip(k + 1) {
            let c = ai as i128 * binom(i, k);
            let (pl, ph) = (self.pow_lo[i - k], self.pow_hi[i - k]);
            if c >= 0 {
                lo += c * pl;
                hi += c * ph;
            } else {
                lo += c * ph;
                hi += c * pl;
            }
        }
        Coord { lo, hi }
    }

    fn coords(&self, a: &[i64]) -> Vec<Coord> {
        (0..=self.n)
            .map(|k| {
                let t = self.tail(a, k);
                let base = (a[k] as i128) << FRAC;
                Coord {
                    lo: t.lo + base,
                    hi: t.hi + base,
                }
            })
            .collect()
    }

    /// Calls `f` on every nonzero integer vector that may lie in `lambda·C(q)`.
    fn walk(&self, lambda: &BigRational, f: &mut impl FnMut(&[i64], &[Coord])) {
        let bounds: Vec<i128> = self
            .scale
            .iter()
            .map(|s| ceil_fixed(&(lambda * s)))
            .collect();
        let mut a = vec![0i64; self.n + 1];
        self.walk_from(self.n, &bounds, &mut a, f);
    }

    fn walk_from(
        &self,
        k: usize,
        bounds: &[i128],
        a: &mut Vec<i64>,
        f: &mut impl FnMut(&[i64], &[Coord]),
    ) {
        let t = self.tail(a, k);
        let one = 1i128 << FRAC;
        let lo = div_ceil(-bounds[k] - t.hi, one);
        let hi = div_floor(bounds[k] - t.lo, one);
        for v in lo..=hi {
            a[k] = v as i64;
            if k == 0 {
                if a.iter().any(|&c| c != 0) {
                    let c = self.coords(a);
                    f(a, &c);
                }
            } else {
                self.walk_from(k - 1, bounds, a, f);
            }
        }
        a[k] = 0;
    }

    /// Certified `μ(v) >= lambda`.
    fn mu_at_least(&self, c: &[Coord], lambda: &BigRational) -> bool {
        c.iter()
            .zip(&self.scale)
            .any(|(ck, s)| ck.abs_lo() >= ceil_fixed(&(lambda * s)))
    }

    /// Certified `μ(v) <= lambda`.
    fn mu_at_most(&self, c: &[Coord], lambda: &BigRational) -> bool {
        c.iter()
            .zip(&self.scale)
            .all(|(ck, s)| ck.abs_hi() <= floor_fixed(&(lambda * s)))
    }

    fn mu_f64(&self, c: &[Coord]) -> f64 {
        let unit = (FRAC as f64).exp2();
        c.iter()
            .zip(&self.scale)
            .map(|(ck, s)| {
                let mid = (ck.lo as f64 + ck.hi as f64) / 2.0 / unit;
                mid.abs() / s.to_f64().unwrap_or(f64::NAN)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaReport {
    pub xi: String,
    pub n: usize,
    pub q: u64,
    /// Index of the convergent with denominator `q` whose basis is tested.
    pub index: usize,
    /// `1 / (2^(n^2) (n+1)!)`, as `numerator/denominator`
    pub lambda0: String,
    /// Scale `2^n` of the enumerated body.
    pub enumeration_scale: u64,
    /// Nonzero integer polynomials enumerated in `2^n·C(q)`.
    pub enumerated: u64,
    /// Smallest `μ` seen; estimates the first minimum.
    pub first_minimum_estimate: f64,
    /// Every enumerated point has certified `μ >= lambda0`.
    pub first_minimum_bound_ok: bool,
    pub basis_mu: Vec<f64>,
    /// Every basis polynomial has certified `μ <= 2^n`.
    pub basis_within: bool,
    pub basis_unimodular: bool,
    pub pass: bool,
}

/// Finds the convergent with denominator `q` (first occurrence) and its predecessor.
fn convergent_with_denominator(
    xi: &XiSpec,
    q: u64,
) -> Result<(crate::cf::Convergent, Option<crate::cf::Convergent>)> {
    let target = BigInt::from(q);
    let mut prev = None;
    for c in ConvergentIter::new(xi.clone()) {
        let c = c?;
        if c.q == target {
            return Ok((c, prev));
        }
        if c.q > target {
            break;
        }
        prev = Some(c);
    }
    Err(Error::InvalidArgument(format!(
        "{q} is not a convergent denominator of {xi}"
    )))
}

fn check_caps(n: usize, q: u64) -> Result<()> {
    if n == 0 || n > MAX_N || q == 0 || q > MAX_Q {
        return Err(Error::InvalidArgument(format!(
            "minima probe needs 1 <= n <= {MAX_N} and 1 <= q <= {MAX_Q}"
        )));
    }
    Ok(())
}

/// Integer vectors `(a_0, ..., a_n)` that may lie in `lambda·C(q)`.
pub fn enumerate_body(
    xi: &XiSpec,
    n: usize,
    q: u64,
    lambda: &BigRational,
) -> Result<Vec<Vec<i64>>> {
    check_caps(n, q)?;
    let body = Body::new(xi, n, q)?;
    let mut out = Vec::new();
    body.walk(lambda, &mut |a, _| out.push(a.to_vec()));
    Ok(out)
}

/// `μ(v) = max_k |v^[k](ξ)| / q^(2k−n)` as a float, for diagnostics.
pub fn mu(xi: &XiSpec, n: usize, q: u64, v: &[i64]) -> Result<f64> {
    let body = Body::new(xi, n, q)?;
    Ok(body.mu_f64(&body.coords(v)))
}

pub fn probe_minima(xi: &XiSpec, n: usize, q: u64) -> Result<MinimaReport> {
    check_caps(n, q)?;
    let (conv, prev) = convergent_with_denominator(xi, q)?;
    let basis = build_basis(&conv, prev.as_ref(), n)?;
    let body = Body::new(xi, n, q)?;
    let l0 = lambda0(n);
    let scale = 1u64 << n;
    let big_lambda = int(scale);

    let mut enumerated = 0u64;
    let mut min_mu = f64::INFINITY;
    let mut bound_ok = true;
    body.walk(&big_lambda, &mut |_, c| {
        enumerated += 1;
        min_mu = min_mu.min(body.mu_f64(c));
        bound_ok &= body.mu_at_least(c, &l0);
    });

    let mut basis_mu = Vec::new();
    let mut within = true;
    for p in &basis.basis {
        let v: Vec<i64> = (0..=n)
            .map(|i| p.coeff(i).to_i64().expect("small basis coefficients"))
            .collect();
        let c = body.coords(&v);
        basis_mu.push(body.mu_f64(&c));
        within &= body.mu_at_most(&c, &big_lambda);
    }
    let unimodular = basis.is_unimodular();
    Ok(MinimaReport {
        xi: xi.to_string(),
        n,
        q,
        index: conv.index,
        lambda0: format!("{}/{}", l0.numer(), l0.denom()),
        enumeration_scale: scale,
        enumerated,
        first_minimum_estimate: min_mu,
        first_minimum_bound_ok: bound_ok && enumerated > 0,
        basis_mu,
        basis_within: within,
        basis_unimodular: unimodular,
        pass: bound_ok && enumerated > 0 && within && unimodular && l0.is_positive(),
    })
}
