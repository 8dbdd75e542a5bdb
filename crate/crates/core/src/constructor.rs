//! The explicit lattice basis built from two consecutive convergents and the
//! construction of the clustered irreducible polynomials `P` (degree n) and
//! `Q` (monic, degree n+1).
//!
//! With `L1 = qT − p` and `L0 = q0 T − p0` (or `L0 = 1` at index 0), the
//! products `P_j = L0^j L1^(n−j)` form a unimodular basis of the integer
//! polynomials of degree `<= n`. The real target
//! `R(T) = 2 c5 Σ_k q^(2k−n) (T − ξ)^k`, `c5 = (n+1) 2^(n+1)`, is written in
//! that basis, and each real coordinate is rounded to an integer within
//! distance 2 in the residue class mod 4 of the coordinates of `T^n + 2`.
//! The result is congruent to `T^n + 2` mod 4 (Eisenstein at 2) and its
//! divided derivatives at ξ stay within `[c5, 3 c5]·q^(2k−n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{convergents, determinant as convergent_det, Convergent};
use crate::error::{Error, Result};
use crate::format::IntervalText;
use crate::interval::{int, pow_signed, to_f64, Interval};
use crate::linalg::{self, Matrix};
use crate::poly::{default_precision, taylor_coefficients, IntPoly};
use crate::serde_util::{bigint_str, bigint_vec_str};
use crate::xi::XiSpec;

/// Precision cap for the construction's escalation loop.
pub const MAX_CONSTRUCTION_BITS: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// `P`: degree n.
    DegreeN,
    /// `Q`: monic of degree n+1.
    MonicDegreeN1,
}

impl Kind {
    pub fn degree(self, n: usize) -> usize {
        match self {
            Kind::DegreeN => n,
            Kind::MonicDegreeN1 => n + 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Kind::DegreeN => "P",
            Kind::MonicDegreeN1 => "Q",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    pub n: usize,
    pub q: BigInt,
    pub l0: IntPoly,
    pub l1: IntPoly,
    /// `P_0, ..., P_n`
    pub basis: Vec<IntPoly>,
}

impl LatticeBasis {
    /// Column `j` holds the coefficients of `P_j`.
    pub fn coefficient_matrix(&self) -> Matrix {
        (0..=self.n)
            .map(|i| self.basis.iter().map(|p| p.coeff(i)).collect())
            .collect()
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.coefficient_matrix())
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// `Σ c_j P_j`
    pub fn combine(&self, coords: &[BigInt]) -> IntPoly {
        self.basis
            .iter()
            .zip(coords)
            .fold(IntPoly::zero(), |acc, (p, c)| &acc + &p.scale(c))
    }
}

/// `c5 = (n+1)·2^(n+1)`
pub fn c5(n: usize) -> BigInt {
    BigInt::from(n + 1) << (n + 1)
}

pub fn build_basis(conv: &Convergent, prev: Option<&Convergent>, n: usize) -> Result<LatticeBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "degree parameter n must be >= 1".into(),
        ));
    }
    let l1 = IntPoly::linear(conv.q.clone(), -&conv.p);
    let l0 = match prev {
        Some(pc) => {
            let det = convergent_det(conv, pc);
            if !det.abs().is_one() {
                return Err(Error::NotConsecutive {
                    det: det.to_string(),
                });
            }
            IntPoly::linear(pc.q.clone(), -&pc.p)
        }
        None => {
            if !conv.q.is_one() {
                return Err(Error::InvalidArgument(
                    "the unit form L0 = 1 needs a convergent with q = 1".into(),
                ));
            }
            IntPoly::one()
        }
    };
    let basis = (0..=n).map(|j| &l0.pow(j) * &l1.pow(n - j)).collect();
    Ok(LatticeBasis {
        n,
        q: conv.q.clone(),
        l0,
        l1,
        basis,
    })
}

/// `q^(2k−n)` as an exact rational.
pub fn scale_factor(q: &BigInt, n: usize, k: usize) -> BigRational {
    pow_signed(q, 2 * k as i64 - n as i64)
}

/// Interval checks `|P_j^[k](ξ)| <= 2^n q^(2k−n)`, indexed `[j][k]`.
pub fn basis_bound_checks(basis: &LatticeBasis, xi: &XiSpec, bits: u64) -> Result<Vec<Vec<bool>>> {
    let x = xi.enclosure(bits)?;
    let two_n = int(BigInt::one() << basis.n);
    Ok(basis
        .basis
        .iter()
        .map(|p| {
            taylor_coefficients(p, &x, basis.n)
                .iter()
                .enumerate()
                .map(|(k, v)| v.abs().hi() <= &(&two_n * scale_factor(&basis.q, basis.n, k)))
                .collect()
        })
        .collect())
}

/// Integer coordinates of `target` (degree <= n) in the basis.
pub fn express_in_basis(target: &IntPoly, basis: &LatticeBasis) -> Result<Vec<BigInt>> {
    if target.degree() > basis.n {
        return Err(Error::InvalidArgument(format!(
            "target degree {} exceeds n = {}",
            target.degree(),
            basis.n
        )));
    }
    let rhs: Vec<BigInt> = (0..=basis.n).map(|i| target.coeff(i)).collect();
    linalg::solve_integral(&basis.coefficient_matrix(), &rhs)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Monomial coefficient enclosures of the real target polynomial: `R(T)` for
/// `P`, and the degree-`<= n` part `((T−ξ)^(n+1) − T^(n+1)) + R(T)` for `Q`.
pub fn target_coefficients(x: &Interval, q: &BigInt, n: usize, kind: Kind) -> Vec<Interval> {
    let two_c5 = int(c5(n) * 2);
    let neg_x = -x;
    let pows: Vec<Interval> = (0..=n + 1).map(|e| neg_x.pow(e as u32)).collect();
    (0..=n)
        .map(|i| {
            let mut acc = Interval::zero();
            for k in i..=n {
                let c = &two_c5 * scale_factor(q, n, k) * int(binomial(k, i));
                acc = &acc + &pows[k - i].scale(&c);
            }
            if kind == Kind::MonicDegreeN1 {
                acc = &acc + &pows[n + 1 - i].scale(&int(binomial(n + 1, i)));
            }
            acc
        })
        .collect()
}

/// Interval coordinates θ of the real target in the basis.
pub fn express_r_in_basis(
    xi: &XiSpec,
    basis: &LatticeBasis,
    kind: Kind,
    precision_bits: u64,
) -> Result<Vec<Interval>> {
    let inv = linalg::unimodular_inverse(&basis.coefficient_matrix())?;
    let x = xi.enclosure(precision_bits)?;
    Ok(apply_inverse(
        &inv,
        &target_coefficients(&x, &basis.q, basis.n, kind),
    ))
}

fn apply_inverse(inv: &Matrix, r: &[Interval]) -> Vec<Interval> {
    inv.iter()
        .map(|row| {
            row.iter().zip(r).fold(Interval::zero(), |acc, (m, v)| {
                &acc + &v.scale(&int(m.clone()))
            })
        })
        .collect()
}

/// The integer `a ≡ b (mod 4)` with `|a − θ| <= 2` certified over the whole
/// interval; ties go to the smaller `|a|`, then the smaller `a`.
pub fn select_one(b: &BigInt, theta: &Interval) -> Option<BigInt> {
    let two = int(2);
    let lo = (theta.hi() - &two).ceil().to_integer();
    let hi = (theta.lo() + &two).floor().to_integer();
    let four = BigInt::from(4);
    let mut a = &lo + (b - &lo).mod_floor(&four);
    let mut best: Option<BigInt> = None;
    while a <= hi {
        best = match best {
            None => Some(a.clone()),
            Some(cur) => {
                if a.abs() < cur.abs() || (a.abs() == cur.abs() && a < cur) {
                    Some(a.clone())
                } else {
                    Some(cur)
                }
            }
        };
        a += &four;
    }
    best
}

/// Coefficient selection for every coordinate; `None` if some interval is too
/// wide to certify a choice.
pub fn select_coefficients(b: &[BigInt], theta: &[Interval]) -> Option<Vec<BigInt>> {
    b.iter().zip(theta).map(|(b, t)| select_one(b, t)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeVerdict {
    pub k: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub value: Interval,
}

#[derive(Serialize)]
struct DerivativeVerdictText {
    k: usize,
    lower_ok: bool,
    upper_ok: bool,
    value_interval: IntervalText,
}

impl Serialize for DerivativeVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DerivativeVerdictText {
            k: self.k,
            lower_ok: self.lower_ok,
            upper_ok: self.upper_ok,
            value_interval: IntervalText::from(&self.value),
        }
        .serialize(s)
    }
}

/// Certifies `c5 q^(2k−n) <= |poly^[k](ξ)| <= 3 c5 q^(2k−n)` for `0 <= k <= n`.
///
/// Returns `Ok(None)` when some comparison is undecided at this precision, and
/// `DerivativeBoundViolated` when a bound is certainly false. For the monic
/// kind the `(n+1)`-st divided derivative must be exactly 1.
pub fn check_derivative_bounds(
    poly: &IntPoly,
    kind: Kind,
    q: &BigInt,
    n: usize,
    x: &Interval,
) -> Result<Option<Vec<DerivativeVerdict>>> {
    let c = int(c5(n));
    let three_c = &c * int(3);
    let t = taylor_coefficients(poly, x, kind.degree(n));
    if kind == Kind::MonicDegreeN1 && t[n + 1] != Interval::one() {
        return Err(Error::DerivativeBoundViolated {
            k: n + 1,
            detail: "top divided derivative of a monic polynomial must be 1".into(),
        });
    }
    let mut out = Vec::with_capacity(n + 1);
    for (k, v) in t.iter().take(n + 1).enumerate() {
        let s = scale_factor(q, n, k);
        let lower = &c * &s;
        let upper = &three_c * &s;
        let a = v.abs();
        let lower_ok = a.lo() >= &lower;
        let upper_ok = a.hi() <= &upper;
        if a.hi() < &lower || a.lo() > &upper {
            return Err(Error::DerivativeBoundViolated {
                k,
                detail: format!(
                    "|value| in {a} outside [{}, {}]",
                    to_f64(&lower),
                    to_f64(&upper)
                ),
            });
        }
        if !(lower_ok && upper_ok) {
            return Ok(None);
        }
        out.push(DerivativeVerdict {
            k,
            lower_ok,
            upper_ok,
            value: v.clone(),
        });
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionRecord {
    pub index: usize,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    pub n: usize,
    #[serde(with = "bigint_str")]
    pub c5: BigInt,
    pub kind: Kind,
    #[serde(rename = "coeffs")]
    pub poly: IntPoly,
    #[serde(with = "bigint_vec_str")]
    pub a: Vec<BigInt>,
    #[serde(with = "bigint_vec_str")]
    pub b: Vec<BigInt>,
    #[serde(serialize_with = "ser_theta")]
    pub theta: Vec<Interval>,
    /// `poly ≡ T^d + 2 (mod 4)` for the kind's degree `d`.
    pub residue_check: bool,
    pub eisenstein: bool,
    pub derivative_check: Vec<DerivativeVerdict>,
    #[serde(with = "bigint_str")]
    pub height: BigInt,
    /// `H(poly) / q^n`
    pub height_ratio: f64,
    pub precision_bits: u64,
}

fn ser_theta<S: serde::Serializer>(v: &[Interval], s: S) -> std::result::Result<S::Ok, S::Error> {
    let t: Vec<IntervalText> = v.iter().map(IntervalText::from).collect();
    t.serialize(s)
}

impl ConstructionRecord {
    pub fn all_checks_pass(&self) -> bool {
        self.residue_check
            && self.eisenstein
            && self
                .derivative_check
                .iter()
                .all(|v| v.lower_ok && v.upper_ok)
    }
}

/// `H / q^n` as a float.
pub fn height_ratio(height: &BigInt, q: &BigInt, n: usize) -> f64 {
    let r = BigRational::new(height.clone(), num_traits::pow(q.clone(), n));
    to_f64(&r)
}

/// Starting precision for a construction, clamped to what ξ can deliver.
fn starting_bits(xi: &XiSpec, n: usize, q: &BigInt, floor: u64) -> u64 {
    let want = default_precision(n, q).max(floor).max(64);
    xi.precision_cap().map_or(want, |c| want.min(c))
}

/// Builds `P` (kind `DegreeN`) or `Q` (kind `MonicDegreeN1`) at one convergent.
pub fn construct(
    xi: &XiSpec,
    conv: &Convergent,
    prev: Option<&Convergent>,
    n: usize,
    kind: Kind,
    precision_floor: u64,
) -> Result<ConstructionRecord> {
    let basis = build_basis(conv, prev, n)?;
    let inv = linalg::unimodular_inverse(&basis.coefficient_matrix())?;
    let int_target = match kind {
        Kind::DegreeN => &IntPoly::monomial(n) + &IntPoly::constant(2),
        Kind::MonicDegreeN1 => IntPoly::constant(2),
    };
    let b = express_in_basis(&int_target, &basis)?;
    let q = &conv.q;
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut bits = starting_bits(xi, n, q, precision_floor);
    loop {
        let x = xi.enclosure(bits)?;
        let theta = apply_inverse(&inv, &target_coefficients(&x, q, n, kind));
        let narrow = theta.iter().all(|t| t.width() < quarter);
        if let Some(a) = narrow.then(|| select_coefficients(&b, &theta)).flatten() {
            let mut poly = basis.combine(&a);
            if kind == Kind::MonicDegreeN1 {
                poly = &poly + &IntPoly::monomial(n + 1);
            }
            if let Some(checks) = check_derivative_bounds(&poly, kind, q, n, &x)? {
                let height = poly.height();
                return Ok(ConstructionRecord {
                    index: conv.index,
                    q: q.clone(),
                    n,
                    c5: c5(n),
                    kind,
                    residue_check: poly.is_t_pow_plus_two_mod4(kind.degree(n)),
                    eisenstein: poly.is_eisenstein_at_2(),
                    derivative_check: checks,
                    height_ratio: height_ratio(&height, q, n),
                    height,
                    poly,
                    a,
                    b,
                    theta,
                    precision_bits: bits,
                });
            }
        }
        if bits >= MAX_CONSTRUCTION_BITS {
            return Err(Error::precision("construction did not certify", bits));
        }
        bits *= 2;
    }
}

pub fn construct_p(
    xi: &XiSpec,
    conv: &Convergent,
    prev: Option<&Convergent>,
    n: usize,
) -> Result<ConstructionRecord> {
    construct(xi, conv, prev, n, Kind::DegreeN, 0)
}

pub fn construct_q(
    xi: &XiSpec,
    conv: &Convergent,
    prev: Option<&Convergent>,
    n: usize,
) -> Result<ConstructionRecord> {
    construct(xi, conv, prev, n, Kind::MonicDegreeN1, 0)
}

/// Constructions for the first `count` convergents, in index order and then
/// kind order, computed in parallel.
pub fn construct_family(
    xi: &XiSpec,
    n: usize,
    count: usize,
    kinds: &[Kind],
    precision_floor: u64,
) -> Result<Vec<ConstructionRecord>> {
    let cs = convergents(xi, count)?;
    let jobs: Vec<(usize, Kind)> = (0..count)
        .flat_map(|i| kinds.iter().map(move |&k| (i, k)))
        .collect();
    jobs.par_iter()
        .map(|&(i, kind)| {
            let prev = if i == 0 { None } else { Some(&cs[i - 1]) };
            construct(xi, &cs[i], prev, n, kind, precision_floor)
        })
        .collect()
}
