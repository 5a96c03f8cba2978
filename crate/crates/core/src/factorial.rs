//! Factorial points `(m!, n!)` on integer curves, p-adic valuations of
//! factorials, growth fits and the resulting classification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RationalPoly2;

pub const DEFAULT_CAP: u64 = 100_000;

/// Above this `ln n!` comes from the Stirling series instead of the exact
/// factorial.
const EXACT_LN_FACTORIAL_LIMIT: u64 = 10_000;

pub fn factorial(n: u64) -> Result<BigInt> {
    factorial_capped(n, DEFAULT_CAP)
}

pub fn factorial_capped(n: u64, cap: u64) -> Result<BigInt> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(product(1, n))
}

/// Product of `lo..=hi` by splitting, which keeps operand sizes balanced.
fn product(lo: u64, hi: u64) -> BigInt {
    if lo > hi {
        return BigInt::one();
    }
    if hi - lo < 16 {
        return (lo..=hi).fold(BigInt::one(), |acc, k| acc * k);
    }
    let mid = lo + (hi - lo) / 2;
    product(lo, mid) * product(mid + 1, hi)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    assert!(p >= 2, "base must be at least 2");
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v_p(n!) = (n - s_p(n)) / (p - 1)`.
pub fn legendre_valuation(n: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let num = n - digit_sum(n, p);
    if !num.is_multiple_of(p - 1) {
        return Err(Error::Internal(format!(
            "(n - s_p(n)) not divisible by p - 1 for n = {n}, p = {p}"
        )));
    }
    Ok(num / (p - 1))
}

/// Exponent of `p` in a nonzero integer.
fn valuation_int(x: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

fn valuation_rat(c: &BigRational, p: u64) -> i64 {
    valuation_int(c.numer(), p) - valuation_int(c.denom(), p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorialPoint {
    pub m: u64,
    pub n: u64,
    #[serde(with = "bigint_string")]
    pub m_fact: BigInt,
    #[serde(with = "bigint_string")]
    pub n_fact: BigInt,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FactorialPoint {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        Ok(Self {
            m,
            n,
            m_fact: factorial(m)?,
            n_fact: factorial(n)?,
        })
    }
}

/// Every `(m!, n!)` with `1 <= m <= m_max`, `1 <= n <= n_max` on `P = 0`,
/// in lexicographic order of `(m, n)`.
pub fn enumerate_factorial_points(p: &RationalPoly2, m_max: u64, n_max: u64) -> Result<Vec<FactorialPoint>> {
    enumerate_factorial_points_capped(p, m_max, n_max, DEFAULT_CAP)
}

pub fn enumerate_factorial_points_capped(
    p: &RationalPoly2,
    m_max: u64,
    n_max: u64,
    cap: u64,
) -> Result<Vec<FactorialPoint>> {
    for v in [m_max, n_max] {
        if v > cap {
            return Err(Error::CapExceeded { n: v, cap });
        }
    }
    if !p.has_integer_coefficients() {
        return Err(Error::domain("factorial enumeration needs integer coefficients"));
    }
    let top = m_max.max(n_max);
    // facts[k] = k!, built incrementally
    let mut facts = Vec::with_capacity(top as usize + 1);
    facts.push(BigInt::one());
    for k in 1..=top {
        let next = &facts[k as usize - 1] * k;
        facts.push(next);
    }
    let terms: Vec<((u32, u32), BigInt)> = p.terms().map(|(e, c)| (*e, c.numer().clone())).collect();
    let dx = p.degree_x() as usize;
    let dy = p.degree_y() as usize;
    let pow_table = |v: &BigInt, d: usize| -> Vec<BigInt> {
        let mut out = Vec::with_capacity(d + 1);
        out.push(BigInt::one());
        for k in 1..=d {
            let next = &out[k - 1] * v;
            out.push(next);
        }
        out
    };
    let y_pows: Vec<Vec<BigInt>> = (1..=n_max).map(|n| pow_table(&facts[n as usize], dy)).collect();

    let stripes: Vec<Vec<FactorialPoint>> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let xp = pow_table(&facts[m as usize], dx);
            (1..=n_max)
                .filter(|&n| {
                    let yp = &y_pows[n as usize - 1];
                    let v = terms.iter().fold(BigInt::zero(), |acc, ((i, j), c)| {
                        acc + c * &xp[*i as usize] * &yp[*j as usize]
                    });
                    v.is_zero()
                })
                .map(|n| FactorialPoint {
                    m,
                    n,
                    m_fact: facts[m as usize].clone(),
                    n_fact: facts[n as usize].clone(),
                })
                .collect()
        })
        .collect();
    Ok(stripes.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationCertificate {
    pub p: u64,
    pub m: u64,
    pub n: u64,
    /// `((i, j), v_p(c_ij) + i v_p(m!) + j v_p(n!))` for every monomial.
    pub valuations: Vec<((u32, u32), i64)>,
    pub min_value: i64,
    pub argmin_set: Vec<(u32, u32)>,
}

/// Per-monomial p-adic valuations at a root; at least two must tie for the
/// minimum.
pub fn monomial_valuations(poly: &RationalPoly2, p: u64, pt: &FactorialPoint) -> Result<ValuationCertificate> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if poly.terms().any(|(_, c)| valuation_int(c.denom(), p) > 0) {
        return Err(Error::domain(format!("a coefficient has {p} in its denominator")));
    }
    let x = BigRational::from_integer(pt.m_fact.clone());
    let y = BigRational::from_integer(pt.n_fact.clone());
    if !poly.evaluate_exact(&x, &y).is_zero() {
        return Err(Error::NotARoot { m: pt.m, n: pt.n });
    }
    let vm = legendre_valuation(pt.m, p)? as i64;
    let vn = legendre_valuation(pt.n, p)? as i64;
    let valuations: Vec<((u32, u32), i64)> = poly
        .terms()
        .map(|(&(i, j), c)| ((i, j), valuation_rat(c, p) + i as i64 * vm + j as i64 * vn))
        .collect();
    let min_value = valuations.iter().map(|v| v.1).min().unwrap_or(0);
    let argmin_set: Vec<(u32, u32)> = valuations.iter().filter(|v| v.1 == min_value).map(|v| v.0).collect();
    if argmin_set.len() < 2 {
        return Err(Error::CertificateViolation { p });
    }
    Ok(ValuationCertificate {
        p,
        m: pt.m,
        n: pt.n,
        valuations,
        min_value,
        argmin_set,
    })
}

/// Primes up to 20 together with the largest prime not exceeding `m`.
pub fn default_primes(m: u64) -> Vec<u64> {
    let mut ps: Vec<u64> = (2..=20).filter(|&p| is_prime(p)).collect();
    if let Some(q) = (2..=m).rev().find(|&q| is_prime(q)) {
        if !ps.contains(&q) {
            ps.push(q);
        }
    }
    ps
}

/// `ln x` for a positive big integer, from its leading 64 bits.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "logarithm of a non-positive integer");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln n!`: exact factorial for small `n`, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= EXACT_LN_FACTORIAL_LIMIT {
        return ln_bigint(&product(1, n));
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub r_hat: f64,
    pub c_hat: f64,
    /// `ln n_k! - r_hat ln m_k! - ln c_hat`.
    pub residuals: Vec<f64>,
    /// `n_k - r_hat m_k`.
    pub e_values: Vec<f64>,
    /// Residuals in the last third are small or shrinking relative to the
    /// first third.
    pub convergent: bool,
}

/// Least-squares fit `ln n! ~ r ln m! + ln c` over the given points.
pub fn estimate_growth_exponent(points: &[FactorialPoint]) -> Result<GrowthEstimate> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| w[1].m <= w[0].m) {
        return Err(Error::domain("growth fit needs strictly increasing m"));
    }
    let xs: Vec<f64> = points.iter().map(|p| ln_bigint(&p.m_fact).max(0.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| ln_bigint(&p.n_fact).max(0.0)).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all ln m! coincide".into()));
    }
    let r_hat = sxy / sxx;
    let ln_c = my - r_hat * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - r_hat * x - ln_c).collect();
    let e_values = points.iter().map(|p| p.n as f64 - r_hat * p.m as f64).collect();
    let third = (residuals.len() / 3).max(1);
    let head = residuals[..third].iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let tail = residuals[residuals.len() - third..]
        .iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    let convergent = tail <= 1e-9 || tail < 0.5 * head;
    Ok(GrowthEstimate {
        r_hat,
        c_hat: ln_c.exp(),
        residuals,
        e_values,
        convergent,
    })
}

/// `(ln n! - (n ln n - n)) / ln n`.
pub fn stirling_residual(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("stirling residual needs n >= 2"));
    }
    let x = n as f64;
    Ok((ln_factorial(n) - (x * x.ln() - x)) / x.ln())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RForcingReport {
    pub r: String,
    pub e_bound_const: f64,
    pub m_values: Vec<u64>,
    pub n_values: Vec<u64>,
    pub e_values: Vec<f64>,
    /// `((r m + E) ln(r m + E) - E - r m ln m) / (ln m)^2` with `r m + E = n`.
    pub normalized: Vec<f64>,
    /// `max |normalized| <= 2 E_bound + 1`.
    pub bounded: bool,
    /// `|last| > 10 max(|first|, 1)`.
    pub divergent: bool,
}

/// Deterministic synthetic sequences for the forcing argument `r = 1`.
pub fn r_forcing_check(r: Rational64, m_values: &[u64], e_bound_const: f64) -> Result<RForcingReport> {
    r_forcing_check_seeded(r, m_values, e_bound_const, 0)
}

pub fn r_forcing_check_seeded(
    r: Rational64,
    m_values: &[u64],
    e_bound_const: f64,
    seed: u64,
) -> Result<RForcingReport> {
    if *r.numer() <= 0 || *r.denom() <= 0 {
        return Err(Error::domain("r must be positive"));
    }
    if m_values.len() < 2 || m_values.windows(2).any(|w| w[1] <= w[0]) || m_values[0] < 2 {
        return Err(Error::domain("m values must increase from at least 2"));
    }
    let rf = *r.numer() as f64 / *r.denom() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_values = Vec::new();
    let mut e_values = Vec::new();
    let mut normalized = Vec::new();
    for &m in m_values {
        let mf = m as f64;
        let lm = mf.ln();
        let e_target = if e_bound_const > 0.0 {
            e_bound_const * lm * rng.random_range(-1.0..=1.0)
        } else {
            0.0
        };
        let n = (rf * mf + e_target).round().max(1.0);
        let e = n - rf * mf;
        let lhs = n * n.ln() - e - rf * mf * lm;
        n_values.push(n as u64);
        e_values.push(e);
        normalized.push(lhs / (lm * lm));
    }
    let maxabs = normalized.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let first = normalized[0].abs();
    let last = normalized.last().unwrap().abs();
    Ok(RForcingReport {
        r: format!("{}/{}", r.numer(), r.denom()),
        e_bound_const,
        m_values: m_values.to_vec(),
        n_values,
        e_values,
        bounded: maxabs <= 2.0 * e_bound_const + 1.0,
        divergent: last > 10.0 * first.max(1.0),
        normalized,
    })
}

/// `count` integers spread geometrically over `[lo, hi]`, deduplicated.
pub fn log_spaced(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<u64> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count.max(2) - 1) as f64).exp().round() as u64)
        .collect();
    v.dedup();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorialClass {
    Vertical(u64),
    Horizontal(u64),
    Diagonal,
    SparseOrNone,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorialClassification {
    pub class: FactorialClass,
    pub points: Vec<FactorialPoint>,
    pub threshold: usize,
    pub warning: Option<String>,
    pub caveat: String,
}

/// `true` iff `p = s * (X - a)` for a nonzero rational `s`.
fn proportional_to_line(p: &RationalPoly2, var: (u32, u32), a: &BigInt) -> bool {
    let lead = p.coeff(var.0, var.1);
    if lead.is_zero() || p.terms().any(|(e, _)| *e != var && *e != (0, 0)) {
        return false;
    }
    p.coeff(0, 0) == -lead * BigRational::from_integer(a.clone())
}

/// Vertical, horizontal or diagonal when at least `threshold` factorial
/// points are found and they fit the corresponding exact form.
pub fn classify_factorial_curve(
    p: &RationalPoly2,
    m_max: u64,
    n_max: u64,
    threshold: usize,
) -> Result<FactorialClassification> {
    if p.is_constant() {
        return Err(Error::Degenerate(format!("'{p}' is constant")));
    }
    let points = enumerate_factorial_points(p, m_max, n_max)?;
    let caveat = format!(
        "'infinitely many' is read as at least {threshold} points with m <= {m_max}, n <= {n_max}; finiteness is not certified"
    );
    let mut out = FactorialClassification {
        class: FactorialClass::SparseOrNone,
        points,
        threshold,
        warning: None,
        caveat,
    };
    if out.points.len() < threshold {
        return Ok(out);
    }
    let pts = &out.points;
    let first = &pts[0];
    if pts.iter().all(|q| q.m == first.m) && proportional_to_line(p, (1, 0), &first.m_fact) {
        out.class = FactorialClass::Vertical(first.m);
    } else if pts.iter().all(|q| q.n == first.n) && proportional_to_line(p, (0, 1), &first.n_fact) {
        out.class = FactorialClass::Horizontal(first.n);
    } else if pts.iter().all(|q| q.m == q.n) && {
        let c = p.coeff(1, 0);
        p.len() == 2 && !c.is_zero() && p.coeff(0, 1) == -c
    } {
        out.class = FactorialClass::Diagonal;
    } else {
        out.warning = Some(format!(
            "{} points found but the curve is none of the three forms; ambiguous at this sample size",
            pts.len()
        ));
    }
    Ok(out)
}
