//! Checks of the approximation bounds against constructed data.
//!
//! Observed constants are minimal over finite families; the theorems only
//! assert that such constants exist. Every pass/fail verdict below comes from
//! an exact comparison of interval endpoints, and undecided comparisons are
//! retried with tighter root disks before being reported.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{
    convergents, is_badly_approximable, BadlyApproximable, Convergent, ConvergentIter,
};
use crate::constructor::{check_derivative_bounds, construct, ConstructionRecord, Kind};
use crate::error::{Error, Result};
use crate::format::{float, sci_nearest, IntervalText};
use crate::interval::{int, ln_abs, ln_bigint, Interval};
use crate::linalg;
use crate::poly::{default_precision, taylor_coefficients, IntPoly};
use crate::roots::{approximant_with_target, target_radius_for, AlgebraicApproximant};
use crate::serde_util::bigint_str;
use crate::xi::XiSpec;

/// Number of radius refinements tried on an undecided comparison.
const REFINEMENTS: u32 = 3;

/// `exp(ln d + e·ln H)`
fn scaled(d: &BigRational, height: &BigInt, e: f64) -> f64 {
    if d.is_zero() {
        return 0.0;
    }
    (ln_abs(d) + e * ln_bigint(height)).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperVerdict {
    /// `max_dist.hi · H^(2/n)`
    pub c_obs: f64,
    pub pass: bool,
}

pub fn check_theorem_upper(appr: &AlgebraicApproximant, n: usize) -> UpperVerdict {
    let c_obs = scaled(appr.max_dist.hi(), &appr.height, 2.0 / n as f64);
    UpperVerdict {
        c_obs,
        pass: c_obs.is_finite() && c_obs > 0.0,
    }
}

/// Exact check `max_dist.hi^n · H^2 <= c^n`.
pub fn certify_upper(appr: &AlgebraicApproximant, n: usize, c: &BigRational) -> bool {
    let lhs = appr.max_dist.hi().pow(n as i32) * int(&appr.height * &appr.height);
    lhs <= c.pow(n as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Discriminant bound, degree-n kind with n >= 2.
    Discriminant,
    /// Integrality of `∏ Q_ξ(α_i)` for quadratic ξ, monic kind.
    QuadraticXi,
    /// Rational ξ: `|P(ξ)| >= s^-deg`.
    RationalXi,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerVerdict {
    pub branch: Branch,
    pub pass: bool,
    /// False when interval comparisons stayed undecided.
    pub decided: bool,
    /// The lower bound on `max_dist` implied by the branch.
    pub bound_value: f64,
    pub max_dist_lo: String,
    /// `bound_value · H^e` where `e` is the branch's exponent.
    pub implied_constant: f64,
    /// Enclosure of `∏ |Q_ξ(α_i)|^2` (quadratic branch).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_sq: Option<IntervalText>,
    /// Exact `Res(minpoly, Q_ξ)` (quadratic branch).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resultant: Option<String>,
}

/// `(x, y) ↦ |a z^2 + b z + c|^2` over a rectangle.
fn quadratic_modulus_sq(coef: &(BigInt, BigInt, BigInt), re: &Interval, im: &Interval) -> Interval {
    let (a, b, c) = (
        int(coef.0.clone()),
        int(coef.1.clone()),
        int(coef.2.clone()),
    );
    let re2 = &re.sqr() - &im.sqr();
    let im2 = (re * im).scale(&int(2));
    let qre = &(&re2.scale(&a) + &re.scale(&b)) + &Interval::point(c);
    let qim = &im2.scale(&a) + &im.scale(&b);
    &qre.sqr() + &qim.sqr()
}

/// Resultant by the Sylvester determinant.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> BigInt {
    let (m, k) = (p.degree(), q.degree());
    let size = m + k;
    let mut rows: linalg::Matrix = Vec::with_capacity(size);
    for shift in 0..k {
        let mut row = vec![BigInt::zero(); size];
        for i in 0..=m {
            row[shift + i] = p.coeff(m - i);
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for i in 0..=k {
            row[shift + i] = q.coeff(k - i);
        }
        rows.push(row);
    }
    linalg::determinant(&rows)
}

fn decided_ge_one(lo: &BigRational, hi: &BigRational) -> Option<bool> {
    if lo >= &BigRational::one() {
        Some(true)
    } else if hi < &BigRational::one() {
        Some(false)
    } else {
        None
    }
}

/// Which branch applies to this approximant and ξ by default.
pub fn default_branch(appr: &AlgebraicApproximant, xi: &XiSpec) -> Option<Branch> {
    if xi.as_rational().is_some() {
        return Some(Branch::RationalXi);
    }
    match appr.kind {
        Kind::DegreeN if appr.n() >= 2 => Some(Branch::Discriminant),
        Kind::MonicDegreeN1 if xi.quadratic_coefficients().is_some() => Some(Branch::QuadraticXi),
        _ => None,
    }
}

pub fn check_optimality_lower(
    appr: &AlgebraicApproximant,
    xi: &XiSpec,
    branch: Branch,
    bits: u64,
) -> Result<LowerVerdict> {
    let n = appr.n();
    let d = &appr.max_dist;
    let h = int(appr.height.clone());
    let ni = n as i32;
    let lo_text = sci_nearest(d.lo());
    match branch {
        Branch::Discriminant => {
            if appr.kind != Kind::DegreeN || n < 2 {
                return Err(Error::BranchUnavailable(
                    "the discriminant bound needs a degree-n approximant with n >= 2; for n = 1 optimality holds only for badly approximable ξ".into(),
                ));
            }
            // (2d)^n H^2 >= 1
            let h2 = &h * &h;
            let f = |x: &BigRational| (x * int(2)).pow(ni) * &h2;
            let decided = decided_ge_one(&f(d.lo()), &f(d.hi()));
            let bound = 0.5 * (-2.0 / n as f64 * ln_bigint(&appr.height)).exp();
            Ok(LowerVerdict {
                branch,
                pass: decided == Some(true),
                decided: decided.is_some(),
                bound_value: bound,
                max_dist_lo: lo_text,
                implied_constant: 0.5,
                product_sq: None,
                resultant: None,
            })
        }
        Branch::QuadraticXi => {
            let coef = xi.quadratic_coefficients().ok_or_else(|| {
                Error::BranchUnavailable("ξ is not given as a quadratic surd".into())
            })?;
            if appr.kind != Kind::MonicDegreeN1 {
                return Err(Error::BranchUnavailable(
                    "the quadratic-ξ bound applies to monic degree n+1 approximants".into(),
                ));
            }
            let qpoly = IntPoly::new(vec![coef.2.clone(), coef.1.clone(), coef.0.clone()]);
            let res = resultant(&appr.minpoly, &qpoly);
            let mods: Vec<Interval> = appr
                .roots
                .iter()
                .map(|r| {
                    let (re, im) = r.rectangle();
                    quadratic_modulus_sq(&coef, &re, &im)
                })
                .collect();
            let prod = mods.iter().fold(Interval::one(), |acc, m| &acc * m);
            let lc4 = int(appr.minpoly.leading().pow(4));
            let res_sq = int(&res * &res) / lc4;
            let integral =
                !res.is_zero() && prod.contains(&res_sq) && prod.hi() >= &BigRational::one();
            // |Q_ξ(α_i)| <= K d for the n close roots with K = |a|(|ξ − ξ'| + max(d, 1))
            let x = xi.enclosure(bits)?;
            let xc = xi
                .conjugate_enclosure(bits)
                .expect("quadratic ξ has a conjugate");
            let gap = (&x - &xc).abs();
            let k = int(coef.0.abs()) * (gap.hi() + d.hi().clone().max(BigRational::one()));
            let far_sq = &mods[appr.chosen_alpha];
            // (d K)^(2n) |Q_ξ(α_far)|^2 >= 1
            let f = |dd: &BigRational, far: &BigRational| (dd * &k).pow(2 * ni) * far;
            let decided = decided_ge_one(&f(d.lo(), far_sq.hi()), &f(d.hi(), far_sq.lo()));
            let ln_bound = -(ln_abs(&k) + 0.5 * ln_abs(far_sq.hi()) / n as f64);
            let bound = ln_bound.exp();
            Ok(LowerVerdict {
                branch,
                pass: integral && decided == Some(true),
                decided: decided.is_some(),
                bound_value: bound,
                max_dist_lo: lo_text,
                implied_constant: (ln_bound + 2.0 / n as f64 * ln_bigint(&appr.height)).exp(),
                product_sq: Some(IntervalText::from(&prod)),
                resultant: Some(res.to_string()),
            })
        }
        Branch::RationalXi => {
            let r = xi
                .as_rational()
                .ok_or_else(|| Error::BranchUnavailable("ξ is not rational".into()))?;
            if appr.minpoly.eval_rational(&r).is_zero() {
                return Err(Error::BranchUnavailable(
                    "ξ is a root of the approximant".into(),
                ));
            }
            let s = int(r.denom().clone());
            // degree n:  d^n H s^n >= 1
            // monic n+1: d^n s^(n+1) (|ξ| + H + 1) >= 1
            let factor = match appr.kind {
                Kind::DegreeN => &h * s.pow(ni),
                Kind::MonicDegreeN1 => s.pow(ni + 1) * (r.abs() + &h + BigRational::one()),
            };
            let f = |x: &BigRational| x.pow(ni) * &factor;
            let decided = decided_ge_one(&f(d.lo()), &f(d.hi()));
            let ln_bound = -ln_abs(&factor) / n as f64;
            Ok(LowerVerdict {
                branch,
                pass: decided == Some(true),
                decided: decided.is_some(),
                bound_value: ln_bound.exp(),
                max_dist_lo: lo_text,
                implied_constant: (ln_bound + ln_bigint(&appr.height) / n as f64).exp(),
                product_sq: None,
                resultant: None,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "i_to_ii")]
    IToIi,
    #[serde(rename = "ii_to_i")]
    IiToI,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub delta: f64,
    pub direction: Direction,
    /// Minimal `c6` with `|P^[k](ξ)| <= c6 H^(1−(n−k)δ)` over the family.
    pub c6: f64,
    /// Minimal `c7` with `max_dist <= c7 H^-δ` over the family.
    pub c7: f64,
    pub c6_per_member: Vec<f64>,
    pub c7_per_member: Vec<f64>,
    pub c6_running: Vec<f64>,
    pub c7_running: Vec<f64>,
}

fn running_max(v: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    v.iter()
        .map(|&x| {
            m = m.max(x);
            m
        })
        .collect()
}

/// Relative growth of the running maximum treated as no change.
pub const STABILITY_RTOL: f64 = 1e-6;

/// Relative growth of the running maximum over the last `window` entries.
pub fn running_max_growth(values: &[f64], window: usize) -> Option<f64> {
    if values.len() <= window {
        return None;
    }
    let r = running_max(values);
    let (before, after) = (r[r.len() - 1 - window], r[r.len() - 1]);
    Some((after - before) / before)
}

/// True when the last `window` entries raised the running maximum by at most
/// [`STABILITY_RTOL`] relative.
pub fn running_max_stable(values: &[f64], window: usize) -> bool {
    running_max_growth(values, window).is_some_and(|g| g <= STABILITY_RTOL)
}

/// Observed constants of both conditions over a family with a common `n` and
/// kind. The direction only records which condition is taken as hypothesis.
pub fn check_equivalence(
    family: &[AlgebraicApproximant],
    xi: &XiSpec,
    delta: f64,
    direction: Direction,
    bits: u64,
) -> Result<EquivalenceReport> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let (n, kind) = (first.n(), first.kind);
    if family.iter().any(|a| a.n() != n || a.kind != kind) {
        return Err(Error::MixedFamily);
    }
    let x = xi.enclosure_capped(bits)?;
    let c6: Vec<f64> = family
        .iter()
        .map(|a| {
            let lh = ln_bigint(&a.height);
            taylor_coefficients(&a.minpoly, &x, n)
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.abs().hi().is_zero())
                .map(|(k, v)| (ln_abs(v.abs().hi()) - (1.0 - (n - k) as f64 * delta) * lh).exp())
                .fold(0.0, f64::max)
        })
        .collect();
    let c7: Vec<f64> = family
        .iter()
        .map(|a| scaled(a.max_dist.hi(), &a.height, delta))
        .collect();
    Ok(EquivalenceReport {
        delta,
        direction,
        c6: c6.iter().copied().fold(0.0, f64::max),
        c7: c7.iter().copied().fold(0.0, f64::max),
        c6_running: running_max(&c6),
        c7_running: running_max(&c7),
        c6_per_member: c6,
        c7_per_member: c7,
    })
}

/// Which lower-bound branch to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalityMode {
    Auto,
    Off,
    Only(Branch),
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub index: usize,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    pub n: usize,
    pub kind: Kind,
    pub coeffs: IntPoly,
    #[serde(with = "bigint_str")]
    pub height: BigInt,
    pub max_dist: IntervalText,
    pub chosen_alpha: usize,
    pub ambiguous_exclusion: bool,
    pub construction_checks_pass: bool,
    pub theorem_upper: UpperVerdict,
    /// Filled at family level against the family's observed constant.
    pub upper_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimality_lower: Option<LowerVerdict>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.construction_checks_pass
            && self.theorem_upper.pass
            && self.upper_certified
            && self.optimality_lower.as_ref().is_none_or(|v| v.pass)
    }
}

/// One polynomial to verify.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Candidate {
    #[serde(default)]
    pub index: usize,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    pub n: usize,
    pub kind: Kind,
    pub coeffs: IntPoly,
}

impl From<&ConstructionRecord> for Candidate {
    fn from(r: &ConstructionRecord) -> Self {
        Candidate {
            index: r.index,
            q: r.q.clone(),
            n: r.n,
            kind: r.kind,
            coeffs: r.poly.clone(),
        }
    }
}

fn branch_for(mode: OptimalityMode, appr: &AlgebraicApproximant, xi: &XiSpec) -> Option<Branch> {
    match mode {
        OptimalityMode::Off => None,
        OptimalityMode::Auto => default_branch(appr, xi),
        OptimalityMode::Only(b) => {
            let fits = match b {
                Branch::Discriminant => appr.kind == Kind::DegreeN && appr.n() >= 2,
                Branch::QuadraticXi => appr.kind == Kind::MonicDegreeN1,
                Branch::RationalXi => true,
            };
            fits.then_some(b)
        }
    }
}

/// Verifies one candidate: root statistics, derivative bounds, the upper
/// constant, and the lower bound, refining root disks while undecided.
pub fn verify_candidate(
    xi: &XiSpec,
    cand: &Candidate,
    mode: OptimalityMode,
    bits: u64,
) -> Result<(VerificationReport, AlgebraicApproximant)> {
    let n = cand.n;
    if cand.coeffs.degree() != cand.kind.degree(n) {
        return Err(Error::InvalidArgument(format!(
            "polynomial degree {} does not match kind {} with n = {n}",
            cand.coeffs.degree(),
            cand.kind.label()
        )));
    }
    let bits = bits.max(default_precision(n, &cand.q));
    let x = xi.enclosure_capped(bits)?;
    let construction_ok = match check_derivative_bounds(&cand.coeffs, cand.kind, &cand.q, n, &x) {
        Ok(Some(_)) => true,
        Ok(None) | Err(Error::DerivativeBoundViolated { .. }) => false,
        Err(e) => return Err(e),
    };
    let construction_ok =
        construction_ok && cand.coeffs.is_t_pow_plus_two_mod4(cand.kind.degree(n));
    let mut target = target_radius_for(&cand.coeffs.height(), n);
    let mut attempt = 0;
    loop {
        let appr = approximant_with_target(&cand.coeffs, cand.kind, xi, bits, &target)?;
        let lower = match branch_for(mode, &appr, xi) {
            Some(b) => Some(check_optimality_lower(&appr, xi, b, bits)?),
            None => None,
        };
        let undecided = lower.as_ref().is_some_and(|l| !l.decided);
        if undecided && attempt < REFINEMENTS {
            attempt += 1;
            target = &target * &target;
            continue;
        }
        let report = VerificationReport {
            index: cand.index,
            q: cand.q.clone(),
            n,
            kind: cand.kind,
            coeffs: cand.coeffs.clone(),
            height: appr.height.clone(),
            max_dist: IntervalText::from(&appr.max_dist),
            chosen_alpha: appr.chosen_alpha,
            ambiguous_exclusion: appr.ambiguous_exclusion,
            construction_checks_pass: construction_ok,
            theorem_upper: check_theorem_upper(&appr, n),
            upper_certified: false,
            optimality_lower: lower,
        };
        return Ok((report, appr));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KindSummary {
    pub kind: Kind,
    pub count: usize,
    /// Family maximum of `c_obs`.
    pub c_obs_max: f64,
    pub c_obs_running: Vec<f64>,
    /// Relative growth of the running maximum over the last five records.
    pub c_obs_growth_last5: Option<f64>,
    pub c_obs_stable: bool,
    pub equivalence: Vec<EquivalenceReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub xi: String,
    pub n: usize,
    pub records: Vec<VerificationReport>,
    pub summaries: Vec<KindSummary>,
    pub all_pass: bool,
}

/// Rational upper bound slightly above a positive float.
fn rational_above(x: f64) -> BigRational {
    BigRational::from_f64(x * (1.0 + 1e-9)).unwrap_or_else(|| int(1u64 << 62))
}

/// Verifies a list of candidates (in the given order) and summarizes each
/// kind's family.
pub fn verify_candidates(
    xi: &XiSpec,
    cands: &[Candidate],
    mode: OptimalityMode,
    bits: u64,
) -> Result<FamilyReport> {
    let n = cands.first().ok_or(Error::EmptyFamily)?.n;
    if cands.iter().any(|c| c.n != n) {
        return Err(Error::MixedFamily);
    }
    if let OptimalityMode::Only(b) = mode {
        let kinds: Vec<Kind> = cands.iter().map(|c| c.kind).collect();
        let any_fits = match b {
            Branch::Discriminant => n >= 2 && kinds.contains(&Kind::DegreeN),
            Branch::QuadraticXi => {
                xi.quadratic_coefficients().is_some() && kinds.contains(&Kind::MonicDegreeN1)
            }
            Branch::RationalXi => xi.as_rational().is_some(),
        };
        if !any_fits {
            return Err(Error::BranchUnavailable(format!(
                "no record admits the {b:?} branch"
            )));
        }
    }
    let mut results: Vec<(VerificationReport, AlgebraicApproximant)> = cands
        .par_iter()
        .map(|c| verify_candidate(xi, c, mode, bits))
        .collect::<Result<_>>()?;
    let mut summaries = Vec::new();
    for kind in [Kind::DegreeN, Kind::MonicDegreeN1] {
        let idx: Vec<usize> = (0..results.len())
            .filter(|&i| results[i].0.kind == kind)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let c_obs: Vec<f64> = idx
            .iter()
            .map(|&i| results[i].0.theorem_upper.c_obs)
            .collect();
        let c_max = c_obs.iter().copied().fold(0.0, f64::max);
        let c_rat = rational_above(c_max);
        for &i in &idx {
            results[i].0.upper_certified = certify_upper(&results[i].1, n, &c_rat);
        }
        let family: Vec<AlgebraicApproximant> = idx.iter().map(|&i| results[i].1.clone()).collect();
        let delta = 2.0 / n as f64;
        let equivalence = [Direction::IToIi, Direction::IiToI]
            .iter()
            .map(|&d| check_equivalence(&family, xi, delta, d, bits))
            .collect::<Result<_>>()?;
        summaries.push(KindSummary {
            kind,
            count: idx.len(),
            c_obs_max: c_max,
            c_obs_growth_last5: running_max_growth(&c_obs, 5),
            c_obs_stable: running_max_stable(&c_obs, 5),
            c_obs_running: running_max(&c_obs),
            equivalence,
        });
    }
    let records: Vec<VerificationReport> = results.into_iter().map(|(r, _)| r).collect();
    let all_pass = records.iter().all(|r| r.pass());
    Ok(FamilyReport {
        xi: xi.to_string(),
        n,
        records,
        summaries,
        all_pass,
    })
}

/// Builds and verifies the first `count` convergents for each kind.
pub fn verify_family(
    xi: &XiSpec,
    n: usize,
    count: usize,
    kinds: &[Kind],
    mode: OptimalityMode,
    bits: u64,
) -> Result<FamilyReport> {
    let recs = crate::constructor::construct_family(xi, n, count, kinds, bits)?;
    let cands: Vec<Candidate> = recs.iter().map(Candidate::from).collect();
    verify_candidates(xi, &cands, mode, bits)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    /// `(ln H, ln max_dist)`
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Ordinary least squares on `(ln H, ln max_dist)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            got: points.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all heights coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(ExponentFit {
        points: points.to_vec(),
        slope,
        intercept,
        residual: (rss / m).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub index: usize,
    #[serde(with = "bigint_str")]
    pub q: BigInt,
    #[serde(with = "bigint_str")]
    pub height: BigInt,
    #[serde(skip)]
    pub max_dist: Interval,
    pub c_obs: f64,
    /// `H / X`
    pub ratio: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub in_window: bool,
    pub checks_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub xi: String,
    pub n: usize,
    pub kind: Kind,
    pub rows: Vec<SweepRow>,
    pub fit: Option<ExponentFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    /// `min H/X`
    pub c3: f64,
    /// `max H/X`
    pub c4: f64,
    /// `c4 / c3`
    pub window_ratio: f64,
    /// ξ has bounded partial quotients, so the window is guaranteed to exist.
    pub window_guaranteed: bool,
}

/// Log-spaced grid `lo..hi` with `steps` points.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && steps >= 1) || (steps == 1 && hi != lo) {
        return Err(Error::InvalidArgument(format!(
            "bad grid {lo}..{hi}x{steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..steps)
        .map(|i| {
            let e = a + (b - a) * i as f64 / (steps - 1) as f64;
            let r = 10f64.powf(e);
            // snap to the nearest integer power when within rounding noise
            let re = e.round();
            if (e - re).abs() < 1e-12 {
                10f64.powi(re as i32)
            } else {
                r
            }
        })
        .collect())
}

/// Sweeps a grid of `X`, picking at each the first convergent with `q^n >= X`.
pub fn sweep(
    xi: &XiSpec,
    n: usize,
    grid: &[f64],
    kind: Kind,
    precision_floor: u64,
) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x >= 1.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "grid values must be finite, >= 1 and strictly increasing".into(),
        ));
    }
    // walk the convergents once, recording the pair used for each X
    let mut it = ConvergentIter::new(xi.clone());
    let mut prev: Option<Convergent> = None;
    let mut cur = it
        .next()
        .ok_or(Error::RationalInput("empty expansion".into()))??;
    let mut picks = Vec::with_capacity(grid.len());
    for &x in grid {
        let xr = BigRational::from_f64(x).expect("finite");
        while int(num_traits::pow(cur.q.clone(), n)) < xr {
            let next = match it.next() {
                Some(c) => c?,
                None => {
                    return Err(Error::RationalInput(
                        "expansion ended before the grid was covered".into(),
                    ))
                }
            };
            prev = Some(std::mem::replace(&mut cur, next));
        }
        picks.push((x, cur.clone(), prev.clone()));
    }
    let rows: Vec<(SweepRow, f64)> = picks
        .par_iter()
        .map(|(x, c, p)| {
            let rec = construct(xi, c, p.as_ref(), n, kind, precision_floor)?;
            let cand = Candidate::from(&rec);
            let (rep, appr) = verify_candidate(xi, &cand, OptimalityMode::Auto, precision_floor)?;
            let ratio = (ln_bigint(&rep.height) - x.ln()).exp();
            let ln_d = ln_abs(&appr.max_dist.mid());
            Ok((
                SweepRow {
                    x: *x,
                    index: rec.index,
                    q: rec.q.clone(),
                    height: rep.height.clone(),
                    max_dist: appr.max_dist.clone(),
                    c_obs: rep.theorem_upper.c_obs,
                    ratio,
                    window_lo: 0.0,
                    window_hi: 0.0,
                    in_window: false,
                    checks_pass: rep.construction_checks_pass
                        && rep.optimality_lower.as_ref().is_none_or(|l| l.pass),
                },
                ln_d,
            ))
        })
        .collect::<Result<_>>()?;
    let c3 = rows.iter().map(|r| r.0.ratio).fold(f64::INFINITY, f64::min);
    let c4 = rows.iter().map(|r| r.0.ratio).fold(0.0, f64::max);
    let mut points = Vec::new();
    let mut seen_q: Vec<BigInt> = Vec::new();
    let rows: Vec<SweepRow> = rows
        .into_iter()
        .map(|(mut r, ln_d)| {
            r.window_lo = c3 * r.x;
            r.window_hi = c4 * r.x;
            let h = ln_bigint(&r.height);
            r.in_window = h >= (c3 * r.x).ln() - 1e-9 && h <= (c4 * r.x).ln() + 1e-9;
            if !seen_q.contains(&r.q) {
                seen_q.push(r.q.clone());
                points.push((h, ln_d));
            }
            r
        })
        .collect();
    let (fit, fit_error) = match fit_exponent(&points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SweepReport {
        xi: xi.to_string(),
        n,
        kind,
        rows,
        fit,
        fit_error,
        c3,
        c4,
        window_ratio: c4 / c3,
        window_guaranteed: matches!(is_badly_approximable(xi), BadlyApproximable::Yes),
    })
}

/// CSV with columns `X,q,H,max_dist_lo,max_dist_hi,c_obs,window_lo,window_hi`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("X,q,H,max_dist_lo,max_dist_hi,c_obs,window_lo,window_hi\n");
    for r in &report.rows {
        let t = IntervalText::from(&r.max_dist);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            float(r.x),
            r.q,
            r.height,
            t.lo,
            t.hi,
            float(r.c_obs),
            float(r.window_lo),
            float(r.window_hi)
        ));
    }
    out
}

/// First `count` convergents, for callers that need the raw pairs.
pub fn convergent_pairs(
    xi: &XiSpec,
    count: usize,
) -> Result<Vec<(Convergent, Option<Convergent>)>> {
    let cs = convergents(xi, count)?;
    Ok((0..count)
        .map(|i| (cs[i].clone(), i.checked_sub(1).map(|j| cs[j].clone())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::approximant_for;

    #[test]
    fn resultant_small_cases() {
        // Res(T^2 − 2, T^2 − 3) = ∏ (α^2 − 3) over α = ±√2 = 1
        let a = IntPoly::from_i64(&[-2, 0, 1]);
        let b = IntPoly::from_i64(&[-3, 0, 1]);
        assert_eq!(resultant(&a, &b), BigInt::one());
        // Res(T − 5, T^2 − 3) = 5^2 − 3
        assert_eq!(
            resultant(&IntPoly::from_i64(&[-5, 1]), &b),
            BigInt::from(22)
        );
        assert_eq!(
            resultant(&b, &IntPoly::from_i64(&[-5, 1])),
            BigInt::from(22)
        );
    }

    #[test]
    fn exponent_fit_on_exact_line() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert_eq!(
            fit_exponent(&pts[..4]).unwrap_err(),
            Error::InsufficientPoints { got: 4, need: 5 }
        );
    }

    #[test]
    fn grid_parsing_values() {
        let g = log_grid(10.0, 1e8, 8).unwrap();
        assert_eq!(g, vec![1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8]);
        assert_eq!(log_grid(5.0, 5.0, 1).unwrap(), vec![5.0]);
        assert!(log_grid(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn stability_window() {
        assert!(running_max_stable(&[1.0, 3.0, 2.0, 2.0, 2.0, 2.0, 2.0], 5));
        assert!(!running_max_stable(&[1.0, 2.0, 2.0, 2.0, 2.0, 3.0], 5));
        assert!(running_max_stable(
            &[1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0 + 1e-9],
            5
        ));
        assert!(!running_max_stable(&[1.0, 1.0], 5));
    }

    #[test]
    fn sandwich_for_sqrt2_n2() {
        let xi = XiSpec::sqrt(2);
        let rep = verify_family(&xi, 2, 8, &[Kind::DegreeN], OptimalityMode::Auto, 256).unwrap();
        assert!(rep.all_pass);
        for r in &rep.records {
            let l = r.optimality_lower.as_ref().unwrap();
            assert_eq!(l.branch, Branch::Discriminant);
            assert!(l.pass && l.decided);
        }
    }

    #[test]
    fn quadratic_branch_product_is_integral() {
        let xi = XiSpec::sqrt(2);
        let rep =
            verify_family(&xi, 2, 6, &[Kind::MonicDegreeN1], OptimalityMode::Auto, 256).unwrap();
        for r in &rep.records {
            let l = r.optimality_lower.as_ref().unwrap();
            assert_eq!(l.branch, Branch::QuadraticXi);
            assert!(l.pass, "{r:?}");
            assert_ne!(l.resultant.as_deref(), Some("0"));
        }
    }

    #[test]
    fn rational_stand_in() {
        // ξ = 3/2 as the terminating expansion [1; 2]
        let xi = XiSpec::periodic(&[1, 2], &[]);
        for c in [[-2i64, 0, 1], [-5, 0, 2], [1, -3, 1], [7, 1, 3]] {
            let appr = approximant_for(&IntPoly::from_i64(&c), Kind::DegreeN, &xi, 128).unwrap();
            let v = check_optimality_lower(&appr, &xi, Branch::RationalXi, 128).unwrap();
            assert!(v.pass, "{c:?}");
        }
        // ξ itself a root
        let appr = approximant_for(&IntPoly::from_i64(&[-3, 2]), Kind::DegreeN, &xi, 128).unwrap();
        assert!(check_optimality_lower(&appr, &xi, Branch::RationalXi, 128).is_err());
    }

    #[test]
    fn discriminant_refused_for_n1() {
        let xi = XiSpec::golden_ratio();
        let appr = approximant_for(&IntPoly::from_i64(&[-3, 2]), Kind::DegreeN, &xi, 128).unwrap();
        assert!(matches!(
            check_optimality_lower(&appr, &xi, Branch::Discriminant, 128),
            Err(Error::BranchUnavailable(_))
        ));
    }

    #[test]
    fn equivalence_single_member_and_errors() {
        let xi = XiSpec::sqrt(2);
        let appr =
            approximant_for(&IntPoly::from_i64(&[-2, 0, 1]), Kind::DegreeN, &xi, 128).unwrap();
        let r = check_equivalence(std::slice::from_ref(&appr), &xi, 1.0, Direction::IToIi, 128)
            .unwrap();
        assert_eq!(r.c6, r.c6_per_member[0]);
        assert_eq!(r.c7, r.c7_per_member[0]);
        assert!(check_equivalence(&[], &xi, 1.0, Direction::IToIi, 128).is_err());
    }

    #[test]
    fn x_equal_one_uses_first_convergent() {
        let xi = XiSpec::sqrt(2);
        let rep = sweep(&xi, 2, &[1.0], Kind::DegreeN, 128).unwrap();
        assert_eq!(rep.rows[0].q, BigInt::one());
        assert!(rep.fit.is_none() && rep.fit_error.is_some());
    }
}
