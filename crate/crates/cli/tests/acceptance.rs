//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::Command;
use std::time::Instant;

use conjugate_approx::cf::convergents;
use conjugate_approx::constructor::{build_basis, construct_family};
use conjugate_approx::roots::approximant_for;
use conjugate_approx::verifier::{
    check_equivalence, log_grid, running_max_stable, sweep, verify_candidates, verify_family,
    Branch, Candidate, Direction, FamilyReport, OptimalityMode,
};
use conjugate_approx::{probe_minima, ConstructionRecord, IntPoly, Kind, XiSpec};
use num_bigint::BigInt;
use num_traits::{One, Signed};

type Outcome = Result<String, String>;
type Records = [(XiSpec, usize, Vec<ConstructionRecord>)];
type Families = [(usize, FamilyReport)];

fn xis() -> Vec<XiSpec> {
    vec![XiSpec::sqrt(2), XiSpec::sqrt(3), XiSpec::golden_ratio()]
}

fn both() -> [Kind; 2] {
    [Kind::DegreeN, Kind::MonicDegreeN1]
}

/// All constructions of criterion 1, keyed by (ξ, n).
fn criterion1_records() -> Result<Vec<(XiSpec, usize, Vec<ConstructionRecord>)>, String> {
    let mut out = Vec::new();
    for xi in xis() {
        for n in 1..=5 {
            let recs = construct_family(&xi, n, 12, &both(), 256)
                .map_err(|e| format!("{xi} n={n}: {e}"))?;
            out.push((xi.clone(), n, recs));
        }
    }
    Ok(out)
}

fn c1(all: &[(XiSpec, usize, Vec<ConstructionRecord>)]) -> Outcome {
    let mut total = 0;
    let mut failures = Vec::new();
    for (xi, n, recs) in all {
        for r in recs {
            total += 1;
            let expected_k = *n + 1;
            let ok = r.derivative_check.len() == expected_k
                && r.derivative_check.iter().all(|v| v.lower_ok && v.upper_ok);
            if !ok {
                failures.push(format!("{xi} n={n} i={} {}", r.index, r.kind.label()));
            }
        }
    }
    if failures.is_empty() && total == 3 * 5 * 12 * 2 {
        Ok(format!(
            "{total} constructions, two-sided bounds certified for every k, 0 failures"
        ))
    } else {
        Err(format!(
            "{} of {total} failed: {:?}",
            failures.len(),
            failures
        ))
    }
}

fn c2(all: &[(XiSpec, usize, Vec<ConstructionRecord>)]) -> Outcome {
    let mut bad = Vec::new();
    let mut total = 0;
    for (xi, n, recs) in all {
        for r in recs {
            total += 1;
            let deg = r.kind.degree(*n);
            // coefficient-wise: top ≡ 1, middle ≡ 0, constant ≡ 2 (mod 4)
            let four = BigInt::from(4);
            let res: Vec<BigInt> = r
                .poly
                .coeffs()
                .iter()
                .map(|c| ((c % &four) + &four) % &four)
                .collect();
            let shape = r.poly.degree() == deg
                && res.iter().enumerate().all(|(i, c)| {
                    let want = if i == deg {
                        1
                    } else if i == 0 {
                        2
                    } else {
                        0
                    };
                    *c == BigInt::from(want)
                });
            if !(shape && r.residue_check && r.poly.is_eisenstein_at_2()) {
                bad.push(format!("{xi} n={n} i={} {}", r.index, r.kind.label()));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{total} polynomials ≡ T^d + 2 (mod 4), Eisenstein at 2"
        ))
    } else {
        Err(format!("{bad:?}"))
    }
}

fn c3() -> Outcome {
    let mut count = 0;
    for xi in xis() {
        let cs = convergents(&xi, 12).map_err(|e| e.to_string())?;
        for n in 1..=5 {
            for i in 0..12usize {
                let prev = i.checked_sub(1).map(|j| &cs[j]);
                let b =
                    build_basis(&cs[i], prev, n).map_err(|e| format!("{xi} n={n} i={i}: {e}"))?;
                if !b.determinant().abs().is_one() {
                    return Err(format!("{xi} n={n} i={i}: det {}", b.determinant()));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} bases, determinant ±1"))
}

fn c4(reports: &[(usize, FamilyReport)]) -> Outcome {
    let mut notes = Vec::new();
    for (n, rep) in reports {
        for r in &rep.records {
            let lower = r.optimality_lower.as_ref().ok_or("missing lower bound")?;
            if !(lower.branch == Branch::Discriminant && lower.pass && lower.decided) {
                return Err(format!("n={n} i={}: lower bound not certified", r.index));
            }
            if !r.upper_certified {
                return Err(format!("n={n} i={}: upper bound not certified", r.index));
            }
        }
        let s = &rep.summaries[0];
        if !s.c_obs_stable {
            return Err(format!(
                "n={n}: running max of c_obs moved by {:?} (relative) over the last 5",
                s.c_obs_growth_last5
            ));
        }
        notes.push(format!("n={n} c_obs={:.6}", s.c_obs_max));
    }
    Ok(format!(
        "15 records each, both sides certified; {}",
        notes.join(", ")
    ))
}

fn c5() -> Outcome {
    let cases = [
        (XiSpec::sqrt(2), 2usize, log_grid(1e1, 1e8, 8)),
        (XiSpec::golden_ratio(), 3, log_grid(1e2, 1e10, 9)),
        (XiSpec::sqrt(3), 4, log_grid(1e2, 1e12, 11)),
    ];
    let mut notes = Vec::new();
    for (xi, n, grid) in cases {
        let grid = grid.map_err(|e| e.to_string())?;
        let rep = sweep(&xi, n, &grid, Kind::DegreeN, 256).map_err(|e| e.to_string())?;
        let fit = rep.fit.as_ref().ok_or("no fit")?;
        let hs: Vec<f64> = fit.points.iter().map(|p| p.0).collect();
        let decades = (hs.iter().copied().fold(f64::MIN, f64::max)
            - hs.iter().copied().fold(f64::MAX, f64::min))
            / std::f64::consts::LN_10;
        let want = -2.0 / n as f64;
        let msg = format!(
            "({xi}, n={n}) slope {:.4} vs {:.4} over {decades:.1} decades",
            fit.slope, want
        );
        if decades < 6.0 || (fit.slope - want).abs() > 0.15 {
            return Err(msg);
        }
        notes.push(msg);
    }
    Ok(notes.join("; "))
}

fn c6() -> Outcome {
    let grid = log_grid(1e1, 1e8, 8).map_err(|e| e.to_string())?;
    let rep = sweep(&XiSpec::sqrt(2), 2, &grid, Kind::DegreeN, 256).map_err(|e| e.to_string())?;
    let msg = format!(
        "H/X in [{:.4}, {:.4}], hi/lo = {:.4}",
        rep.c3, rep.c4, rep.window_ratio
    );
    if rep.rows.len() == 8 && rep.window_ratio <= 1e3 && rep.rows.iter().all(|r| r.in_window) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c7(reports: &[(usize, FamilyReport)]) -> Outcome {
    let mut notes = Vec::new();
    for (n, rep) in reports {
        for p in &rep.summaries[0].equivalence {
            if !(p.c6.is_finite() && p.c7.is_finite() && p.c6 > 0.0 && p.c7 > 0.0) {
                return Err(format!("n={n} {:?}: non-finite constants", p.direction));
            }
            if (p.delta - 2.0 / *n as f64).abs() > 1e-12 {
                return Err("wrong delta".into());
            }
            if p.direction == Direction::IToIi {
                if !running_max_stable(&p.c7_per_member, 5) {
                    return Err(format!("n={n}: c7 running max not stable"));
                }
                notes.push(format!("n={n} c6={:.4e} c7={:.4}", p.c6, p.c7));
            }
        }
    }
    // counter-family T^2 − m at √2
    let xi = XiSpec::sqrt(2);
    let fam = [3i64, 30, 300, 3_000, 30_000, 300_000]
        .iter()
        .map(|&m| approximant_for(&IntPoly::from_i64(&[-m, 0, 1]), Kind::DegreeN, &xi, 128))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let r = check_equivalence(&fam, &xi, 1.0, Direction::IToIi, 128).map_err(|e| e.to_string())?;
    let c = &r.c7_per_member;
    let growth = c[c.len() - 1] / c[0];
    if !(c.windows(2).all(|w| w[1] > w[0]) && growth >= 10.0) {
        return Err(format!("counter-family c7 {c:?}"));
    }
    notes.push(format!("counter-family c7 grows {growth:.0}x"));
    Ok(notes.join(", "))
}

fn c8() -> Outcome {
    let xi = XiSpec::golden_ratio();
    let mut total = 0u64;
    for n in 1..=3 {
        for q in [1u64, 2, 3, 5, 8] {
            let r = probe_minima(&xi, n, q).map_err(|e| format!("n={n} q={q}: {e}"))?;
            if !r.pass {
                return Err(format!("n={n} q={q}: {r:?}"));
            }
            total += r.enumerated;
        }
    }
    Ok(format!(
        "15 cases, {total} lattice points enumerated, all with μ >= λ0; bases within 2^n C(q)"
    ))
}

fn c9(all: &[(XiSpec, usize, Vec<ConstructionRecord>)]) -> Outcome {
    let mut count = 0;
    let mut implied = 0;
    for (xi, n, recs) in all.iter().filter(|(xi, _, _)| *xi == XiSpec::sqrt(2)) {
        let cands: Vec<Candidate> = recs
            .iter()
            .filter(|r| r.kind == Kind::MonicDegreeN1)
            .map(Candidate::from)
            .collect();
        let rep = verify_candidates(xi, &cands, OptimalityMode::Only(Branch::QuadraticXi), 256)
            .map_err(|e| format!("n={n}: {e}"))?;
        for r in &rep.records {
            let l = r.optimality_lower.as_ref().ok_or("missing verdict")?;
            let prod = l.product_sq.as_ref().ok_or("missing product")?;
            let hi: f64 = prod.hi.parse().map_err(|_| "bad product text")?;
            let res = l.resultant.as_deref().unwrap_or("0");
            if !(hi >= 1.0 && res != "0") {
                return Err(format!(
                    "n={n} i={}: product {prod:?}, resultant {res}",
                    r.index
                ));
            }
            count += 1;
            implied += l.pass as usize;
        }
    }
    if implied != count {
        return Err(format!(
            "{count} products >= 1 but only {implied} implied distance bounds certified"
        ));
    }
    Ok(format!("{count} monic records: product is a nonzero integer (>= 1) and the implied distance bound holds"))
}

fn c10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_conjapprox");
    let run = || {
        Command::new(bin)
            .args([
                "construct",
                "--xi",
                "sqrt:2",
                "--n",
                "2",
                "--count",
                "5",
                "--no-timestamp",
            ])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    if !a.status.success() || !b.status.success() {
        return Err(format!(
            "exit {:?} / {:?}",
            a.status.code(),
            b.status.code()
        ));
    }
    if a.stdout.is_empty() || a.stdout != b.stdout {
        return Err("outputs differ".into());
    }
    Ok(format!("{} bytes, identical", a.stdout.len()))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let all = criterion1_records();
    let families: Result<Vec<(usize, FamilyReport)>, String> = (2..=4)
        .map(|n| {
            verify_family(
                &XiSpec::sqrt(2),
                n,
                15,
                &[Kind::DegreeN],
                OptimalityMode::Auto,
                256,
            )
            .map(|r| (n, r))
            .map_err(|e| format!("n={n}: {e}"))
        })
        .collect();
    let with = |f: &dyn Fn(&Records) -> Outcome| match &all {
        Ok(a) => f(a),
        Err(e) => Err(e.clone()),
    };
    let with_fam = |f: &dyn Fn(&Families) -> Outcome| match &families {
        Ok(a) => f(a),
        Err(e) => Err(e.clone()),
    };
    results.push((1, "construction bounds", with(&c1)));
    results.push((2, "irreducibility certificate", with(&c2)));
    results.push((3, "unimodularity", c3()));
    results.push((4, "upper/lower sandwich", with_fam(&c4)));
    results.push((5, "exponent reproduction", c5()));
    results.push((6, "height window", c6()));
    results.push((7, "equivalence constants", with_fam(&c7)));
    results.push((8, "minima probe", c8()));
    results.push((9, "quadratic-xi optimality", with(&c9)));
    results.push((10, "determinism", c10()));

    let mut failed = 0;
    for (i, name, r) in &results {
        match r {
            Ok(m) => println!("PASS criterion {i:>2} ({name}): {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {i:>2} ({name}): {m}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
