use conjugate_approx::cf::{convergents, determinant, is_badly_approximable, BadlyApproximable};
use conjugate_approx::interval::int;
use conjugate_approx::{Error, XiSpec};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

/// Classical (m, d, a) recurrence for the expansion of √D.
fn sqrt_cf(d: i64, terms: usize) -> Vec<i64> {
    let a0 = (d as f64).sqrt().floor() as i64;
    let (mut m, mut den, mut a) = (0i64, 1i64, a0);
    let mut out = vec![a0];
    while out.len() < terms {
        m = den * a - m;
        den = (d - m * m) / den;
        a = (a0 + m) / den;
        out.push(a);
    }
    out
}

fn non_square() -> impl Strategy<Value = i64> {
    (2i64..500).prop_filter("non-square", |d| {
        let s = (*d as f64).sqrt() as i64;
        s * s != *d && (s + 1) * (s + 1) != *d
    })
}

proptest! {
    #[test]
    fn sqrt_expansion_matches_recurrence(d in non_square()) {
        let xi = XiSpec::sqrt(d);
        let cs = convergents(&xi, 12).unwrap();
        let quotients = sqrt_cf(d, 12);
        // rebuild convergents from the reference quotients
        let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(1), BigInt::from(0), BigInt::from(quotients[0]), BigInt::from(1));
        prop_assert_eq!(&cs[0].p, &p1);
        for (k, &a) in quotients.iter().enumerate().skip(1) {
            let p2 = BigInt::from(a) * &p1 + &p0;
            let q2 = BigInt::from(a) * &q1 + &q0;
            prop_assert_eq!(&cs[k].p, &p2);
            prop_assert_eq!(&cs[k].q, &q2);
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
        }
    }

    #[test]
    fn convergent_invariants(d in non_square()) {
        let xi = XiSpec::sqrt(d);
        let cs = convergents(&xi, 15).unwrap();
        let x = xi.enclosure(256).unwrap();
        for w in cs.windows(2) {
            prop_assert!(determinant(&w[1], &w[0]).abs() == BigInt::from(1));
            prop_assert!(w[1].q > w[0].q || w[0].q == BigInt::from(1));
        }
        for c in &cs {
            // |qξ − p| <= 1/q
            let e = (&x.scale(&int(c.q.clone())) - &conjugate_approx::Interval::from_int(c.p.clone())).abs();
            prop_assert!(e.hi() * int(c.q.clone()) <= int(1));
        }
    }

    #[test]
    fn text_form_round_trips(a in 1i64..6, b in -10i64..10, c in -10i64..-1, minus in any::<bool>()) {
        let root = if minus { "-" } else { "+" };
        let s = format!("quadratic:{a},{b},{c}:root={root}");
        match s.parse::<XiSpec>() {
            Ok(xi) => {
                let again: XiSpec = xi.to_string().parse().unwrap();
                prop_assert_eq!(again, xi);
            }
            Err(e) => prop_assert!(matches!(e, Error::RationalInput(_))),
        }
    }

    #[test]
    fn pell_relation(d in non_square()) {
        // the convergent ending the first period solves p^2 − D q^2 = ±1
        let xi = XiSpec::sqrt(d);
        let len = sqrt_cf(d, 200).iter().skip(1).position(|&a| a == 2 * sqrt_cf(d, 1)[0]).unwrap() + 1;
        let c = &convergents(&xi, len).unwrap()[len - 1];
        let v = &c.p * &c.p - BigInt::from(d) * &c.q * &c.q;
        prop_assert!(v.abs() == BigInt::from(1));
    }
}

#[test]
fn variants_and_errors() {
    assert!(matches!(
        "sqrt:9".parse::<XiSpec>(),
        Err(Error::RationalInput(_))
    ));
    assert!(matches!(
        "quadratic:1,0,1".parse::<XiSpec>(),
        Err(Error::InvalidXi(_))
    ));
    assert!("cf:1,(0)".parse::<XiSpec>().is_err());
    assert!("nonsense".parse::<XiSpec>().is_err());
    assert_eq!(
        is_badly_approximable(&XiSpec::sqrt(2)),
        BadlyApproximable::Yes
    );
    let pi = XiSpec::decimal("3.14159265358979323846264338327950288", 100).unwrap();
    assert!(matches!(
        is_badly_approximable(&pi),
        BadlyApproximable::Unknown { .. }
    ));
    let cs = convergents(&pi, 4).unwrap();
    let pq: Vec<(i64, i64)> = cs
        .iter()
        .map(|c| ((&c.p).try_into().unwrap(), (&c.q).try_into().unwrap()))
        .collect();
    assert_eq!(pq, vec![(3, 1), (22, 7), (333, 106), (355, 113)]);
}
