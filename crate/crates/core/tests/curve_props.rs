mod common;

use gamma_bialg::irreducible::{probable_irreducibility, Irreducibility};
use gamma_bialg::poly::{parse_poly, RationalPoly2};
use gamma_bialg::trace::{find_seed_points, trace_real_locus, trace_real_locus_with, Rect, TraceOptions, TRACE_TOL};
use gamma_bialg::Direction;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;

fn poly_strategy(max_deg: u32, max_terms: usize) -> impl Strategy<Value = RationalPoly2> {
    prop::collection::vec(((0..=max_deg, 0..=max_deg), (-50i64..=50, 1i64..=12)), 0..=max_terms).prop_map(|ts| {
        RationalPoly2::from_terms(
            ts.into_iter()
                .map(|((i, j), (n, d))| ((i, j), BigRational::new(BigInt::from(n), BigInt::from(d)))),
        )
    })
}

fn dyadic(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_parse_round_trip(p in poly_strategy(6, 10)) {
        let text = p.to_string();
        prop_assert_eq!(parse_poly(&text).unwrap(), p, "{}", text);
    }

    #[test]
    fn exact_and_float_evaluation_agree(p in poly_strategy(4, 8), x in -1000.0f64..1000.0, y in -1000.0f64..1000.0) {
        let exact = p.evaluate_exact(&dyadic(x), &dyadic(y)).to_f64().unwrap();
        let float = p.evaluate_float(x, y);
        // relative to the largest monomial, since the sum may cancel
        let scale = p.terms()
            .map(|(&(i, j), c)| c.abs().to_f64().unwrap() * x.abs().powi(i as i32) * y.abs().powi(j as i32))
            .fold(0.0f64, f64::max);
        prop_assert!((exact - float).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "{} vs {}", exact, float);
    }

    #[test]
    fn exact_evaluation_is_ring_homomorphism(p in poly_strategy(3, 6), q in poly_strategy(3, 6), x in -20i64..20, y in -20i64..20) {
        let (x, y) = (BigRational::from_integer(x.into()), BigRational::from_integer(y.into()));
        let prod = &p * &q;
        prop_assert_eq!(prod.evaluate_exact(&x, &y), p.evaluate_exact(&x, &y) * q.evaluate_exact(&x, &y));
        let sum = &p + &q;
        prop_assert_eq!(sum.evaluate_exact(&x, &y), p.evaluate_exact(&x, &y) + q.evaluate_exact(&x, &y));
    }

    #[test]
    fn traced_points_satisfy_curve(a in -3i64..=3, b in -3i64..=3, r in 1i64..=4) {
        // circle of radius r centred at (a, b)
        let p = parse_poly(&format!("(X - ({a}))^2 + (Y - ({b}))^2 - {}", r * r)).unwrap();
        let f = p.to_float();
        let seed = (a as f64 + r as f64, b as f64);
        let s = trace_real_locus(&p, seed, 400, 0.05).unwrap();
        for &(x, y) in &s.points {
            let (v, gx, gy) = f.eval_grad(x, y);
            prop_assert!(v.abs() / gx.hypot(gy).max(1.0) <= TRACE_TOL);
        }
        for w in s.points.windows(2) {
            let d = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
            prop_assert!(d <= 2.0 * 0.05);
        }
    }

    #[test]
    fn x_axis_trace_stays_on_axis(x0 in -50.0f64..50.0, h in 0.001f64..0.5, back in any::<bool>()) {
        let p = parse_poly("Y").unwrap();
        let opts = TraceOptions {
            direction: if back { Direction::Backward } else { Direction::Forward },
            ..TraceOptions::default()
        };
        let s = trace_real_locus_with(&p, (x0, 0.0), 300, h, opts).unwrap();
        prop_assert!(s.points.iter().all(|&(_, y)| y.abs() <= 1e-9));
    }

    #[test]
    fn reducibility_witness_divides(p in poly_strategy(2, 4), q in poly_strategy(2, 4)) {
        prop_assume!(!p.is_constant() && !q.is_constant());
        let prod = &p * &q;
        if let Irreducibility::Reducible { witness, .. } = probable_irreducibility(&prod, 8) {
            prop_assert!(!witness.is_constant());
            prop_assert!(prod.div_exact(&witness).is_some(), "{} does not divide {}", witness, prod);
        }
    }
}

#[test]
fn seeds_land_on_each_component() {
    let p = parse_poly("X*Y - 1").unwrap();
    let seeds = find_seed_points(&p, Rect::new(-4.0, 4.0, -4.0, 4.0), 24).unwrap();
    assert!(seeds.iter().any(|s| s.0 > 0.0) && seeds.iter().any(|s| s.0 < 0.0));
    let f = p.to_float();
    assert!(seeds.iter().all(|&(x, y)| f.eval(x, y).abs() <= 1e-10));
}

#[test]
fn empty_real_locus_is_reported() {
    let p = parse_poly("X^2 + Y^2 + 1").unwrap();
    assert!(find_seed_points(&p, Rect::new(-4.0, 4.0, -4.0, 4.0), 24).is_err());
}
