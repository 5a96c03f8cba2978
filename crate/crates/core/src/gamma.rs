//! Complex Gamma function and the coordinate maps built on it.
//!
//! `gamma` uses a Lanczos rational approximation (g = 607/128, 15 terms) on
//! `Re z >= 1/2` and the reflection formula elsewhere. Everything is computed
//! through `log Gamma` so that overflow is detected rather than producing
//! infinities, and real arguments take a purely real path so that
//! `Gamma(x)` has an imaginary part of exactly zero.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

const LANCZOS_G: f64 = 607.0 / 128.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

#[allow(clippy::excessive_precision)]
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Largest and smallest `ln|x|` representable as a normal-or-subnormal double.
const LN_MAX: f64 = 709.782_712_893_384;
const LN_MIN: f64 = -745.133_219_101_941_1;

/// Shift limit for the recurrence used by `log_gamma` on the left half-plane.
const MAX_SHIFT: f64 = 1.0e6;

/// `true` iff `z` is exactly a non-positive integer.
pub fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Membership in `S = Z<=0 x {0}`.
pub fn in_pole_set(x: f64, y: f64) -> bool {
    is_pole(Complex64::new(x, y))
}

/// `sin(pi x)` with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 1.0 {
        -s
    } else {
        s
    }
}

/// `cos(pi x)` with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let c = (PI * r).cos();
    if n.rem_euclid(2.0) == 1.0 {
        -c
    } else {
        c
    }
}

/// A logarithm of `sin(pi z)` that stays finite for large `|Im z|`.
///
/// Uses `sin(pi z) = e^{pi|y|}/2 * [sin(pi x)(1 + e) + i sgn(y) cos(pi x)(1 - e)]`
/// with `e = exp(-2 pi |y|)`.
fn log_sin_pi(z: Complex64) -> Complex64 {
    let ay = z.im.abs();
    let e = (-2.0 * PI * ay).exp();
    let one_minus_e = -(-2.0 * PI * ay).exp_m1();
    let sgn = if z.im < 0.0 { -1.0 } else { 1.0 };
    let inner = Complex64::new(sin_pi(z.re) * (1.0 + e), sgn * cos_pi(z.re) * one_minus_e);
    Complex64::new(PI * ay - std::f64::consts::LN_2, 0.0) + inner.ln()
}

/// Lanczos `log Gamma(z)` for `Re z >= 1/2`; analytic there.
fn lanczos_log(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + sum.ln()
}

fn lanczos_log_real(x: f64) -> f64 {
    let xm1 = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (xm1 + k as f64);
    }
    let t = xm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm1 + 0.5) * t.ln() - t + sum.ln()
}

/// `(ln|Gamma(x)|, sign Gamma(x))` for real non-pole `x`.
fn real_log_abs_gamma(x: f64) -> (f64, f64) {
    if x >= 0.5 {
        (lanczos_log_real(x), 1.0)
    } else {
        let s = sin_pi(x);
        let (lg, _) = real_log_abs_gamma(1.0 - x);
        (PI.ln() - s.abs().ln() - lg, s.signum())
    }
}

fn checked_exp_real(z: Complex64, log_abs: f64, sign: f64) -> Result<f64> {
    if !(LN_MIN..=LN_MAX).contains(&log_abs) {
        return Err(Error::Overflow {
            z,
            log_modulus: log_abs,
        });
    }
    Ok(sign * log_abs.exp())
}

fn real_gamma(x: f64) -> Result<f64> {
    let z = Complex64::new(x, 0.0);
    if x > 0.0 && x.fract() == 0.0 && x <= 23.0 {
        // (n-1)! is exact in double precision up to 22!
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    let (l, s) = real_log_abs_gamma(x);
    checked_exp_real(z, l, s)
}

/// The Gamma function on `C \ Z<=0`.
///
/// Real inputs return an exactly real result. Inputs within rounding of a
/// pole but not exactly on it evaluate normally.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::pole(z));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(real_gamma(z.re)?, 0.0));
    }
    let log = if z.re >= 0.5 {
        lanczos_log(z)
    } else {
        Complex64::new(PI.ln(), 0.0) - log_sin_pi(z) - lanczos_log(1.0 - z)
    };
    if !(LN_MIN..=LN_MAX).contains(&log.re) {
        return Err(Error::Overflow { z, log_modulus: log.re });
    }
    Ok(log.exp())
}

/// Analytic `log Gamma` on `C` minus the non-positive real axis, real on
/// `(0, inf)`. On the negative axis the value is the limit from above.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::pole(z));
    }
    if z.im == 0.0 && z.re > 0.0 {
        return Ok(Complex64::new(lanczos_log_real(z.re), 0.0));
    }
    if z.re >= 0.5 {
        return Ok(lanczos_log(z));
    }
    let shift = (0.5 - z.re).ceil();
    if shift > MAX_SHIFT {
        return Err(Error::domain(format!("log_gamma: Re z = {} is too far left", z.re)));
    }
    let n = shift as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = z + k as f64;
        // Log(w) on the cut takes the upper-side value.
        acc += if w.im == 0.0 && w.re < 0.0 {
            Complex64::new((-w.re).ln(), PI)
        } else {
            w.ln()
        };
    }
    Ok(lanczos_log(z + shift) - acc)
}

/// `log Gamma(i t)` continued continuously from `t -> 0+`.
///
/// The imaginary part is obtained by unwinding the principal argument of
/// `Gamma(i s)` while stepping `s` upward, so it carries the full winding
/// of the imaginary-axis image around the origin.
pub fn log_gamma_along_ray(t: f64) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("log_gamma_along_ray needs t > 0, got {t}")));
    }
    let principal_arg = |s: f64| -> Result<(f64, f64)> {
        let l = log_gamma(Complex64::new(0.0, s))?;
        Ok((l.re, wrap_angle(l.im)))
    };
    let mut s = t.min(0.5);
    let (mut re, mut prev_arg) = principal_arg(s)?;
    // On (0, 1/2] the argument of Gamma(is) stays inside (-pi, -pi/2],
    // so the principal value is already the continuous one.
    let mut im = prev_arg;
    while s < t {
        let h = 0.5 / (1.0 + (1.0 + s).ln());
        s = (s + h).min(t);
        let (r, a) = principal_arg(s)?;
        im += wrap_angle(a - prev_arg);
        prev_arg = a;
        re = r;
    }
    Ok(Complex64::new(re, im))
}

/// Reduce an angle to `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Digamma `psi = Gamma'/Gamma` on the real line.
pub fn digamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::pole(Complex64::new(x, 0.0)));
    }
    if x < 0.5 {
        // psi(x) = psi(1 - x) - pi cot(pi x)
        let cot = cos_pi(x) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * cot);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    // Bernoulli tail: B_{2k} / (2k y^{2k}), k = 1..7
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + y.ln() - 0.5 / y - tail)
}

/// `|Gamma(x) sin(pi x) Gamma(1 - x) - pi| / pi`.
pub fn reflection_residual(x: f64) -> Result<f64> {
    if x.fract() == 0.0 {
        return Err(Error::domain(format!("reflection residual undefined at integer {x}")));
    }
    let a = real_gamma(x)?;
    let b = real_gamma(1.0 - x)?;
    Ok((a * sin_pi(x) * b - PI).abs() / PI)
}

/// `G(x, y) = (Re Gamma(x + iy), Im Gamma(x + iy))`.
#[allow(non_snake_case)]
pub fn G(x: f64, y: f64) -> Result<(f64, f64)> {
    let g = gamma(Complex64::new(x, y))?;
    Ok((g.re, g.im))
}

/// `f(v, w) = (v + i w, v - i w)`.
pub fn f_map(v: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let iw = Complex64::i() * w;
    (v + iw, v - iw)
}

/// `g(a, b) = ((a + b)/2, (a - b)/(2i))`, the inverse of [`f_map`].
pub fn g_map(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let d = a - b;
    // (a - b) / (2i) = -i (a - b) / 2
    ((a + b) * 0.5, Complex64::new(d.im, -d.re) * 0.5)
}

/// Coordinatewise Gamma on `C^2`.
pub fn gamma2(z1: Complex64, z2: Complex64) -> Result<(Complex64, Complex64)> {
    let tag = |c: usize| {
        move |e: Error| match e {
            Error::Pole { z, .. } => Error::Pole { z, component: Some(c) },
            other => other,
        }
    };
    Ok((gamma(z1).map_err(tag(0))?, gamma(z2).map_err(tag(1))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_values() {
        assert_eq!(gamma(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0));
        assert_relative_eq!(gamma(c(0.5, 0.0)).unwrap().re, PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn poles_are_exact() {
        for k in 0..5 {
            let z = c(-(k as f64), 0.0);
            assert!(matches!(gamma(z), Err(Error::Pole { .. })));
            assert!(matches!(log_gamma(z), Err(Error::Pole { .. })));
        }
        // near a pole the value is large but finite
        let g = gamma(c(-3.0 + 1e-9, 0.0)).unwrap();
        assert!(g.re.abs() > 1e7);
        assert!(!is_pole(c(0.0, 1e-300)));
    }

    #[test]
    fn overflow_is_flagged() {
        assert!(matches!(gamma(c(200.0, 0.0)), Err(Error::Overflow { .. })));
        assert!(matches!(gamma(c(0.0, 1000.0)), Err(Error::Overflow { .. })));
        assert!(log_gamma(c(200.0, 0.0)).is_ok());
    }

    #[test]
    fn log_gamma_anchors() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().re.abs() < 1e-15);
        assert_relative_eq!(log_gamma(c(0.5, 0.0)).unwrap().re, 0.5 * PI.ln(), max_relative = 1e-13);
        assert_relative_eq!(
            log_gamma(c(10.0, 0.0)).unwrap().re,
            362880f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_gamma_negative_real_axis_matches_modulus() {
        for &x in &[-0.5, -2.5, -7.3] {
            let l = log_gamma(c(x, 0.0)).unwrap();
            let g = gamma(c(x, 0.0)).unwrap();
            assert_relative_eq!(l.re, g.re.abs().ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn ray_domain() {
        assert!(matches!(log_gamma_along_ray(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma_along_ray(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ray_modulus_matches_gamma() {
        let l = log_gamma_along_ray(2.0).unwrap();
        let g = gamma(c(0.0, 2.0)).unwrap();
        assert_relative_eq!(l.re.exp(), g.norm(), max_relative = 1e-10);
    }

    #[test]
    fn ray_is_continuous() {
        let mut prev = log_gamma_along_ray(1.0).unwrap().im;
        let mut t = 1.0;
        while t < 50.0 {
            t += 1e-3;
            let cur = log_gamma_along_ray(t).unwrap().im;
            assert!((cur - prev).abs() <= 0.1, "jump at t = {t}");
            prev = cur;
        }
    }

    #[test]
    fn ray_growth() {
        let t = 1000.0;
        let ratio = log_gamma_along_ray(t).unwrap().im / (t * t.ln());
        assert!((0.80..=1.05).contains(&ratio), "{ratio}");
    }

    #[test]
    fn digamma_values() {
        // Euler-Mascheroni constant from its defining series, summed with
        // an Euler-Maclaurin tail so that it is independent of `digamma`.
        let n = 100_000u32;
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let nf = n as f64;
        let euler = h - nf.ln() - 0.5 / nf + 1.0 / (12.0 * nf * nf);
        assert_relative_eq!(digamma(1.0).unwrap(), -euler, max_relative = 1e-10);
        assert_relative_eq!(digamma(2.0).unwrap(), 1.0 - euler, max_relative = 1e-10);
        assert!(matches!(digamma(-2.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn digamma_root_on_positive_axis() {
        // bisection oracle on Gamma' sign via finite differences of ln Gamma
        let slope = |x: f64| lanczos_log_real(x + 1e-6) - lanczos_log_real(x - 1e-6);
        let (mut a, mut b) = (1.2, 1.7);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if slope(m) < 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let root = 0.5 * (a + b);
        assert!(digamma(root).unwrap().abs() < 1e-9);
        assert!(digamma(1.461_632_144_968_362).unwrap().abs() < 1e-9);
    }

    #[test]
    fn reflection_residual_values() {
        assert!(reflection_residual(0.5).unwrap() < 1e-12);
        assert!(reflection_residual(-2.5).unwrap() < 1e-10);
        assert!(reflection_residual(-7.3).unwrap() < 1e-10);
        assert!(matches!(reflection_residual(3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g_on_real_axis() {
        assert_eq!(G(1.0, 0.0).unwrap(), (1.0, 0.0));
        let (re, im) = G(0.5, 0.0).unwrap();
        assert_relative_eq!(re, PI.sqrt(), max_relative = 1e-13);
        assert_eq!(im, 0.0);
        assert!(G(3.7, 0.0).unwrap().1.abs() <= 1e-14);
        assert!(matches!(G(-4.0, 0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn f_and_g_maps() {
        assert_eq!(f_map(c(0.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(f_map(c(1.0, 0.0), c(2.0, 0.0)), (c(1.0, 2.0), c(1.0, -2.0)));
        let (a, b) = f_map(c(0.3, 0.0), c(-1.7, 0.0));
        assert_eq!(a, b.conj());
        assert_eq!(g_map(c(0.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(0.0, 0.0)));
        let (v, w) = (c(3.0, -1.0), c(2.0, 5.0));
        let (a, b) = f_map(v, w);
        let (v2, w2) = g_map(a, b);
        assert!((v2 - v).norm() <= 1e-15 && (w2 - w).norm() <= 1e-15);
    }

    #[test]
    fn diagram_at_two_one() {
        let z = c(2.0, 1.0);
        let (a, b) = gamma2(z, z.conj()).unwrap();
        let (re, im) = g_map(a, b);
        let (gx, gy) = G(2.0, 1.0).unwrap();
        assert!((re - gx).norm() <= 1e-12 && (im - gy).norm() <= 1e-12);
    }

    #[test]
    fn gamma2_components() {
        assert_eq!(gamma2(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), (c(1.0, 0.0), c(1.0, 0.0)));
        let (a, b) = gamma2(c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(a, c(1.0, 0.0));
        assert_relative_eq!(b.re, PI.sqrt(), max_relative = 1e-13);
        let z = c(1.3, 0.7);
        let (a, b) = gamma2(z, z).unwrap();
        assert_eq!(a, b);
        match gamma2(c(1.0, 0.0), c(-2.0, 0.0)) {
            Err(Error::Pole { component, .. }) => assert_eq!(component, Some(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trig_reduction() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(cos_pi(2.0), 1.0);
        assert_eq!(cos_pi(1.0), -1.0);
        assert_relative_eq!(sin_pi(-2.5), -1.0);
    }
}
