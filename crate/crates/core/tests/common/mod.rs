#![allow(dead_code)]

pub mod oracle;

use gamma_bialg::poly::RationalPoly2;
use gamma_bialg::upoly::complex_roots;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense polynomial of total degree exactly `deg` with integer
/// coefficients in `[-5, 5]`.
pub fn random_poly(rng: &mut ChaCha8Rng, deg: u32) -> RationalPoly2 {
    loop {
        let mut terms = Vec::new();
        for k in 0..=deg {
            for b in 0..=k {
                let c: i64 = rng.random_range(-5..=5);
                terms.push(((k - b, b), c));
            }
        }
        let p = RationalPoly2::from_int_terms(&terms);
        if p.total_degree() == deg {
            return p;
        }
    }
}

fn real_roots_in(coeffs: &[f64], lim: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() < 2 {
        return Vec::new();
    }
    complex_roots(&c)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) && z.re.abs() <= lim)
        .map(|z| z.re)
        .collect()
}

/// Polynomial in `Y` at fixed `x`, ascending.
fn y_coeffs(w: &RationalPoly2, x: f64) -> Vec<f64> {
    w.coefficients_in_y()
        .iter()
        .map(|row| row.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap()))
        .collect()
}

/// Points of the real locus of `w` in `[-lim, lim]^2`, found by solving
/// along random vertical and horizontal lines and polishing with Newton.
pub fn sample_locus(w: &RationalPoly2, want: usize, lim: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let f = w.to_float();
    let swapped = w.swap_xy();
    let mut out = Vec::new();
    for _ in 0..want * 40 {
        if out.len() >= want {
            break;
        }
        let t: f64 = rng.random_range(-lim..lim);
        let vertical = rng.random_bool(0.5);
        let coeffs = if vertical {
            y_coeffs(w, t)
        } else {
            y_coeffs(&swapped, t)
        };
        for s in real_roots_in(&coeffs, lim) {
            let (mut x, mut y) = if vertical { (t, s) } else { (s, t) };
            for _ in 0..8 {
                let (v, gx, gy) = f.eval_grad(x, y);
                let g2 = gx * gx + gy * gy;
                if g2 == 0.0 {
                    break;
                }
                x -= v * gx / g2;
                y -= v * gy / g2;
            }
            let (v, gx, gy) = f.eval_grad(x, y);
            if v.abs() <= 1e-12 * (1.0 + gx.hypot(gy)) && x.abs() <= lim && y.abs() <= lim {
                out.push((x, y));
            }
        }
    }
    out
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent of `p` in `n!` by factoring every factor.
pub fn trial_division_valuation(n: u64, p: u64) -> u64 {
    (2..=n)
        .map(|mut k| {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            e
        })
        .sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
