//! Certified complex root enclosures and conjugate-distance statistics.
//!
//! Approximations come from Aberth–Ehrlich simultaneous iteration in
//! fixed-point big-integer arithmetic. They are then certified exactly: with
//! Weierstrass corrections `W_i = p(z_i) / (a_m ∏_{j≠i}(z_i − z_j))`, every
//! root lies in a disk `|z − z_i| ≤ m|W_i|`, and when those disks are pairwise
//! disjoint each holds exactly one root (Gerschgorin applied to the
//! companion-like matrix `diag(z) − W·1ᵀ`). Centers are exact dyadic
//! rationals, so the disk test is evaluated without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::constructor::{ConstructionRecord, Kind};
use crate::error::{Error, Result};
use crate::format::{sci, IntervalText, Rounding, OUTPUT_DIGITS};
use crate::interval::{pow2, sqrt_ceil, Interval};
use crate::poly::IntPoly;
use crate::xi::XiSpec;

/// Closed disk containing exactly one root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEnclosure {
    pub re: BigRational,
    pub im: BigRational,
    pub radius: BigRational,
    pub multiplicity: u32,
}

impl RootEnclosure {
    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        let dr = re - &self.re;
        let di = im - &self.im;
        &dr * &dr + &di * &di <= &self.radius * &self.radius
    }

    /// Enclosure of `|x − α|` for `x` ranging over a real interval.
    pub fn distance_to(&self, x: &Interval, bits: u64) -> Interval {
        let dx = x - &Interval::point(self.re.clone());
        let d2 = &dx.sqr() + &Interval::point(&self.im * &self.im);
        let d = d2.sqrt(bits);
        let lo = (d.lo() - &self.radius).max(BigRational::zero());
        Interval::new(lo, d.hi() + &self.radius)
    }

    /// Real and imaginary part enclosures (the bounding square of the disk).
    pub fn rectangle(&self) -> (Interval, Interval) {
        (
            Interval::new(&self.re - &self.radius, &self.re + &self.radius),
            Interval::new(&self.im - &self.radius, &self.im + &self.radius),
        )
    }
}

#[derive(Serialize)]
struct RootText {
    re: String,
    im: String,
    radius: String,
}

impl Serialize for RootEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RootText {
            re: sci(&self.re, OUTPUT_DIGITS, Rounding::Nearest),
            im: sci(&self.im, OUTPUT_DIGITS, Rounding::Nearest),
            radius: sci(&self.radius, 3, Rounding::Up),
        }
        .serialize(s)
    }
}

type Cx = (BigInt, BigInt);

/// Fixed-point complex arithmetic with scale `2^bits`.
#[derive(Clone, Copy)]
struct Fixed {
    bits: u64,
}

impl Fixed {
    fn encode_f64(self, x: f64) -> BigInt {
        let e = self.bits as i32;
        // split to keep the conversion exact for large scales
        let (m, ex) = frexp(x);
        let mi = (m * 2f64.powi(53)) as i64;
        let shift = e + ex - 53;
        let v = BigInt::from(mi);
        if shift >= 0 {
            v << shift as usize
        } else {
            v >> (-shift) as usize
        }
    }

    fn encode(self, x: &BigInt) -> BigInt {
        x << self.bits as usize
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        (
            (&a.0 * &b.0 - &a.1 * &b.1) >> self.bits as usize,
            (&a.0 * &b.1 + &a.1 * &b.0) >> self.bits as usize,
        )
    }

    fn div(&self, a: &Cx, b: &Cx) -> Option<Cx> {
        let d = &b.0 * &b.0 + &b.1 * &b.1;
        if d.is_zero() {
            return None;
        }
        let re = ((&a.0 * &b.0 + &a.1 * &b.1) << self.bits as usize) / &d;
        let im = ((&a.1 * &b.0 - &a.0 * &b.1) << self.bits as usize) / &d;
        Some((re, im))
    }

    fn rescale(&self, a: &Cx, to: Fixed) -> Cx {
        let s = to.bits as i64 - self.bits as i64;
        let f = |v: &BigInt| {
            if s >= 0 {
                v << s as usize
            } else {
                v >> (-s) as usize
            }
        };
        (f(&a.0), f(&a.1))
    }

    fn decode(self, v: &BigInt) -> BigRational {
        BigRational::new(v.clone(), BigInt::one() << self.bits as usize)
    }
}

fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (0.0, 0);
    }
    let e = x.abs().log2().floor() as i32 + 1;
    let m = x / 2f64.powi(e);
    (m, e)
}

fn horner(fx: Fixed, coeffs: &[BigInt], z: &Cx) -> (Cx, Cx) {
    // value and derivative
    let mut p: Cx = (BigInt::zero(), BigInt::zero());
    let mut dp: Cx = (BigInt::zero(), BigInt::zero());
    for c in coeffs.iter().rev() {
        let t = fx.mul(&dp, z);
        dp = (&t.0 + &p.0, &t.1 + &p.1);
        let t = fx.mul(&p, z);
        p = (&t.0 + c, t.1);
    }
    (p, dp)
}

fn initial_points(p: &IntPoly, fx: Fixed) -> Vec<Cx> {
    let m = p.degree();
    let lead = crate::interval::to_f64(&BigRational::from_integer(p.leading()));
    let coeff = |i: usize| crate::interval::to_f64(&BigRational::from_integer(p.coeff(i))) / lead;
    let center = -coeff(m - 1) / m as f64;
    // Fujiwara-type bound on root moduli
    let mut r: f64 = 0.0;
    for i in 0..m {
        let c = coeff(i).abs();
        if c > 0.0 {
            r = r.max(c.powf(1.0 / (m - i) as f64));
        }
    }
    let r = (2.0 * r).max(1e-3);
    (0..m)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            let re = center + r * ang.cos();
            let im = r * ang.sin();
            (fx.encode_f64(re), fx.encode_f64(im))
        })
        .collect()
}

/// One Aberth sweep; returns the bit length of the largest correction.
fn aberth_step(fx: Fixed, coeffs: &[BigInt], z: &mut [Cx]) -> u64 {
    let m = z.len();
    let one: Cx = (BigInt::one() << fx.bits as usize, BigInt::zero());
    let nudge = BigInt::one() << (fx.bits as usize / 2);
    let mut largest = 0u64;
    for i in 0..m {
        let (p, dp) = horner(fx, coeffs, &z[i]);
        if p.0.is_zero() && p.1.is_zero() {
            continue;
        }
        let Some(newton) = fx.div(&p, &dp) else {
            // stationary point
            z[i].0 += &nudge;
            largest = largest.max(fx.bits);
            continue;
        };
        let mut s: Cx = (BigInt::zero(), BigInt::zero());
        for j in 0..m {
            if j == i {
                continue;
            }
            let d = (&z[i].0 - &z[j].0, &z[i].1 - &z[j].1);
            match fx.div(&one, &d) {
                Some(inv) => {
                    s.0 += inv.0;
                    s.1 += inv.1;
                }
                None => z[i].1 += &nudge,
            }
        }
        let ns = fx.mul(&newton, &s);
        let denom = (&one.0 - &ns.0, -ns.1);
        let w = fx.div(&newton, &denom).unwrap_or(newton);
        z[i].0 -= &w.0;
        z[i].1 -= &w.1;
        largest = largest.max(w.0.bits().max(w.1.bits()));
    }
    largest
}

/// Iterates until corrections reach the rounding floor or stop shrinking.
fn aberth(fx: Fixed, coeffs: &[BigInt], z: &mut [Cx]) {
    let mut best = u64::MAX;
    let mut stale = 0;
    for _ in 0..5000 {
        let c = aberth_step(fx, coeffs, z);
        if c <= 12 {
            return;
        }
        if c < best {
            best = c;
            stale = 0;
        } else {
            stale += 1;
            if stale > 30 {
                return;
            }
        }
    }
}

/// Exact Gaussian-rational evaluation.
fn eval_exact(p: &IntPoly, re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for c in p.coeffs().iter().rev() {
        let na = &a * re - &b * im + BigRational::from_integer(c.clone());
        let nb = &a * im + &b * re;
        a = na;
        b = nb;
    }
    (a, b)
}

/// Certifies centers; returns disks if they are pairwise disjoint.
fn certify(
    p: &IntPoly,
    centers: &[(BigRational, BigRational)],
    bits: u64,
) -> Option<Vec<RootEnclosure>> {
    let m = centers.len();
    let lead2 = BigRational::from_integer(p.leading() * p.leading());
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let (pr, pi) = eval_exact(p, &centers[i].0, &centers[i].1);
        let num = &pr * &pr + &pi * &pi;
        let mut den = lead2.clone();
        for j in 0..m {
            if j != i {
                let dr = &centers[i].0 - &centers[j].0;
                let di = &centers[i].1 - &centers[j].1;
                den *= &dr * &dr + &di * &di;
            }
        }
        if den.is_zero() {
            return None;
        }
        let w2 = num / den * BigRational::from_integer(BigInt::from(m * m));
        let radius = sqrt_ceil(&w2, bits + 8);
        out.push(RootEnclosure {
            re: centers[i].0.clone(),
            im: centers[i].1.clone(),
            radius,
            multiplicity: 1,
        });
    }
    for i in 0..m {
        for j in i + 1..m {
            let dr = &out[i].re - &out[j].re;
            let di = &out[i].im - &out[j].im;
            let s = &out[i].radius + &out[j].radius;
            if &dr * &dr + &di * &di <= &s * &s {
                return None;
            }
        }
    }
    Some(out)
}

type RatPoly = Vec<BigRational>;

fn rat_trim(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rat_rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let f = r.last().unwrap() / &lb;
        for (i, c) in b.iter().enumerate() {
            r[i + k] -= &f * c;
        }
        r.pop();
        r = rat_trim(r);
    }
    r
}

/// `gcd(p, p')` over ℚ is constant.
pub fn is_squarefree(p: &IntPoly) -> bool {
    if p.degree() <= 1 {
        return !p.is_zero();
    }
    let to_rat = |q: &IntPoly| -> RatPoly {
        q.coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    };
    let mut a = to_rat(p);
    let mut b = to_rat(&p.derivative());
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

/// Largest precision the root finder escalates to.
pub const MAX_ROOT_BITS: u64 = 1 << 15;

/// `2^-k ≤ H^{-2/n} / 1000`: the radius at which distances at the theorem's
/// scale are decided.
pub fn target_radius_for(height: &BigInt, n: usize) -> BigRational {
    let lg = height.bits().max(1);
    let k = (2 * lg).div_ceil(n.max(1) as u64) + 10;
    pow2(-(k as i64))
}

pub fn default_target_radius(p: &IntPoly) -> BigRational {
    target_radius_for(&p.height(), p.degree().max(1))
}

/// All complex roots of a squarefree polynomial as disjoint certified disks of
/// radius at most `target_radius`.
pub fn all_roots(p: &IntPoly, target_radius: &BigRational) -> Result<Vec<RootEnclosure>> {
    if p.is_zero() {
        return Err(Error::InvalidArgument(
            "zero polynomial has no roots".into(),
        ));
    }
    let m = p.degree();
    if m == 0 {
        return Ok(Vec::new());
    }
    if !is_squarefree(p) {
        return Err(Error::NotSquarefree);
    }
    if m == 1 {
        return Ok(vec![RootEnclosure {
            re: BigRational::new(-p.coeff(0), p.coeff(1)),
            im: BigRational::zero(),
            radius: BigRational::zero(),
            multiplicity: 1,
        }]);
    }
    let target_log = if target_radius.is_positive() {
        -crate::interval::floor_log2(target_radius)
    } else {
        return Err(Error::InvalidArgument(
            "target radius must be positive".into(),
        ));
    };
    let mut bits = (64 + 4 * p.height().bits() as i64 + 2 * target_log.max(0)) as u64;
    let mut fx = Fixed { bits };
    let mut z = initial_points(p, fx);
    loop {
        let coeffs: Vec<BigInt> = p.coeffs().iter().map(|c| fx.encode(c)).collect();
        aberth(fx, &coeffs, &mut z);
        let centers: Vec<(BigRational, BigRational)> = z
            .iter()
            .map(|(a, b)| (fx.decode(a), fx.decode(b)))
            .collect();
        if let Some(mut disks) = certify(p, &centers, bits) {
            if disks.iter().all(|d| &d.radius <= target_radius) {
                disks.sort_by(|a, b| a.re.cmp(&b.re).then(a.im.cmp(&b.im)));
                return Ok(disks);
            }
        }
        if bits >= MAX_ROOT_BITS {
            return Err(Error::precision(
                format!("could not certify roots of {p} to the requested radius"),
                bits,
            ));
        }
        let next = Fixed { bits: bits * 2 };
        z = z.iter().map(|c| fx.rescale(c, next)).collect();
        bits *= 2;
        fx = next;
    }
}

/// An irreducible polynomial with its certified roots and distances to ξ.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicApproximant {
    pub kind: Kind,
    pub minpoly: IntPoly,
    pub roots: Vec<RootEnclosure>,
    #[serde(with = "crate::serde_util::bigint_str")]
    pub height: BigInt,
    #[serde(serialize_with = "ser_intervals")]
    pub distances: Vec<Interval>,
    /// For degree-n kinds the max over all roots; for monic degree n+1 the max
    /// over all roots except `chosen_alpha`.
    #[serde(serialize_with = "ser_interval")]
    pub max_dist: Interval,
    pub chosen_alpha: usize,
    /// Another root's distance interval overlaps the excluded root's.
    pub ambiguous_exclusion: bool,
}

fn ser_interval<S: serde::Serializer>(iv: &Interval, s: S) -> std::result::Result<S::Ok, S::Error> {
    IntervalText::from(iv).serialize(s)
}

fn ser_intervals<S: serde::Serializer>(
    v: &[Interval],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let t: Vec<IntervalText> = v.iter().map(IntervalText::from).collect();
    t.serialize(s)
}

impl AlgebraicApproximant {
    /// Degree parameter `n` (degree, or degree − 1 for the monic kind).
    pub fn n(&self) -> usize {
        match self.kind {
            Kind::DegreeN => self.minpoly.degree(),
            Kind::MonicDegreeN1 => self.minpoly.degree() - 1,
        }
    }

    /// The roots that count toward `max_dist`.
    pub fn close_roots(&self) -> Vec<usize> {
        (0..self.roots.len())
            .filter(|&i| self.kind == Kind::DegreeN || i != self.chosen_alpha)
            .collect()
    }
}

/// Picks the excluded root for the monic kind: the largest center distance,
/// ties to the smallest index.
fn farthest(distances: &[Interval]) -> usize {
    let mut best = 0;
    for (i, d) in distances.iter().enumerate().skip(1) {
        if d.mid() > distances[best].mid() {
            best = i;
        }
    }
    best
}

/// Root statistics for an arbitrary polynomial of the given kind.
pub fn approximant_for(
    poly: &IntPoly,
    kind: Kind,
    xi: &XiSpec,
    precision_bits: u64,
) -> Result<AlgebraicApproximant> {
    let n = match kind {
        Kind::DegreeN => poly.degree(),
        Kind::MonicDegreeN1 => {
            if !poly.is_monic() || poly.degree() < 2 {
                return Err(Error::InvalidArgument(
                    "monic kind needs a monic polynomial of degree >= 2".into(),
                ));
            }
            poly.degree() - 1
        }
    };
    approximant_with_target(
        poly,
        kind,
        xi,
        precision_bits,
        &target_radius_for(&poly.height(), n),
    )
}

/// As [`approximant_for`] with an explicit root radius.
pub fn approximant_with_target(
    poly: &IntPoly,
    kind: Kind,
    xi: &XiSpec,
    precision_bits: u64,
    target: &BigRational,
) -> Result<AlgebraicApproximant> {
    if kind == Kind::MonicDegreeN1 && (!poly.is_monic() || poly.degree() < 2) {
        return Err(Error::InvalidArgument(
            "monic kind needs a monic polynomial of degree >= 2".into(),
        ));
    }
    let height = poly.height();
    let roots = all_roots(poly, target)?;
    let tbits = (-crate::interval::floor_log2(target)).max(0) as u64;
    let bits = precision_bits.max(tbits + 16);
    let x = xi.enclosure_capped(bits)?;
    let distances: Vec<Interval> = roots.iter().map(|r| r.distance_to(&x, bits + 16)).collect();
    let (chosen, max_dist, ambiguous) = match kind {
        Kind::DegreeN => {
            let m = distances
                .iter()
                .skip(1)
                .fold(distances[0].clone(), |acc, d| acc.max(d));
            (0, m, false)
        }
        Kind::MonicDegreeN1 => {
            let c = farthest(&distances);
            let ambiguous = distances
                .iter()
                .enumerate()
                .any(|(i, d)| i != c && d.overlaps(&distances[c]));
            let m = distances
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != c)
                .map(|(_, d)| d.clone())
                .reduce(|acc, d| acc.max(&d))
                .unwrap();
            (c, m, ambiguous)
        }
    };
    Ok(AlgebraicApproximant {
        kind,
        minpoly: poly.clone(),
        roots,
        height,
        distances,
        max_dist,
        chosen_alpha: chosen,
        ambiguous_exclusion: ambiguous,
    })
}

pub fn conjugate_distances(
    record: &ConstructionRecord,
    xi: &XiSpec,
    precision_bits: u64,
) -> Result<AlgebraicApproximant> {
    approximant_for(&record.poly, record.kind, xi, precision_bits)
}

/// `f64` view of a root center, for diagnostics.
pub fn center_f64(r: &RootEnclosure) -> (f64, f64) {
    (
        r.re.to_f64().unwrap_or(f64::NAN),
        r.im.to_f64().unwrap_or(f64::NAN),
    )
}
