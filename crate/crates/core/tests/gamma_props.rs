mod common;

use std::f64::consts::PI;

use gamma_bialg::gamma::{f_map, g_map, gamma, gamma2, log_gamma, reflection_residual, G};
use gamma_bialg::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

#[test]
fn matches_mpmath_reference() {
    for &(x, y, gr, gi, lr, li) in common::oracle::GAMMA_ORACLE {
        let z = c(x, y);
        let g = gamma(z).unwrap();
        let want = c(gr, gi);
        assert!(
            (g - want).norm() <= 1e-13 * want.norm(),
            "gamma({z}) = {g}, want {want}"
        );
        let l = log_gamma(z).unwrap();
        let scale = c(lr, li).norm().max(1.0);
        assert!((l.re - lr).abs() <= 1e-13 * scale, "log_gamma({z}) = {l}, want {lr}");
        assert!((l.im - li).abs() <= 1e-13 * scale, "log_gamma({z}) = {l}, want {li}");
    }
}

#[test]
fn poles_are_errors() {
    for n in 0..30 {
        assert!(matches!(gamma(c(-(n as f64), 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(c(-(n as f64), 0.0)), Err(Error::Pole { .. })));
    }
    assert!(gamma(c(-3.0, 1e-300)).is_ok());
}

#[test]
fn overflow_is_flagged() {
    assert!(matches!(gamma(c(200.0, 0.0)), Err(Error::Overflow { .. })));
    assert!(log_gamma(c(200.0, 0.0)).is_ok());
}

fn off_axis() -> impl Strategy<Value = Complex64> {
    (-20.0f64..20.0, prop_oneof![-20.0f64..-1e-3, 1e-3f64..20.0]).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn conjugation(z in off_axis()) {
        let g = gamma(z).unwrap();
        let h = gamma(z.conj()).unwrap();
        prop_assert!((g.conj() - h).norm() <= 1e-12 * g.norm());
    }

    #[test]
    fn recurrence(x in -20.0f64..19.0, y in -20.0f64..20.0) {
        let z = c(x, y);
        prop_assume!(z.norm() <= 20.0 && !gamma_bialg::gamma::is_pole(z) && !gamma_bialg::gamma::is_pole(z + 1.0));
        let g1 = gamma(z + 1.0).unwrap();
        let g0 = gamma(z).unwrap();
        prop_assert!((g1 - z * g0).norm() <= 1e-11 * g1.norm(), "z = {}", z);
    }

    #[test]
    fn reflection(x in -20.0f64..20.0) {
        prop_assume!(x.fract() != 0.0);
        prop_assert!(reflection_residual(x).unwrap() <= 1e-10);
    }

    #[test]
    fn diagram_commutes(x in -6.0f64..6.0, y in -4.0f64..4.0) {
        prop_assume!(!gamma_bialg::gamma::in_pole_set(x, y));
        let (v, w) = f_map(c(x, 0.0), c(y, 0.0));
        let (a, b) = gamma2(v, w).unwrap();
        let (u, t) = g_map(a, b);
        let (gx, gy) = G(x, y).unwrap();
        let scale = gx.hypot(gy).max(1.0);
        prop_assert!((u.re - gx).abs() <= 1e-10 * scale && (t.re - gy).abs() <= 1e-10 * scale);
        prop_assert!(u.im.abs() <= 1e-10 * scale && t.im.abs() <= 1e-10 * scale);
    }

    #[test]
    fn modulus_on_imaginary_axis(t in 0.1f64..20.0) {
        let g = gamma(c(0.0, t)).unwrap();
        let want = PI / (t * (PI * t).sinh());
        prop_assert!((g.norm_sqr() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn real_inputs_stay_real(x in -30.0f64..30.0) {
        prop_assume!(x.fract() != 0.0 || x > 0.0);
        prop_assert_eq!(gamma(c(x, 0.0)).unwrap().im, 0.0);
    }
}
