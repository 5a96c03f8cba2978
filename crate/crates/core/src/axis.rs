//! Gamma on the real and imaginary axes: negative-axis extrema, preimages of
//! real values, the positive minimum, the modulus identity on the imaginary
//! axis and the winding of `Gamma(it)` around the origin.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{digamma, gamma, log_gamma, log_gamma_along_ray};

/// Distance kept from the poles when bracketing digamma.
const POLE_INSET: f64 = 1e-6;
/// Right end of the search for preimages above the positive minimum.
const PREIMAGE_CAP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    /// Maximum of the negative branch on `(-2n-1, -2n)`.
    NegativeMax,
    /// Minimum of the positive branch on `(-2n-2, -2n-1)`.
    PositiveMin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumRecord {
    pub n: u32,
    pub interval: (f64, f64),
    pub location: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

fn real_gamma(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// Root of `digamma` on `[a, b]`, assuming a sign change.
fn digamma_root(a: f64, b: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let flo = digamma(lo)?;
    let fhi = digamma(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { left: a, right: b });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = digamma(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (dl, dh) = (digamma(lo)?.abs(), digamma(hi)?.abs());
    Ok(if dl <= dh { lo } else { hi })
}

/// The critical point of Gamma between two consecutive negative poles.
pub fn negative_axis_extremum(n: u32, kind: ExtremumKind) -> Result<ExtremumRecord> {
    let k = n as f64;
    let interval = match kind {
        ExtremumKind::NegativeMax => (-2.0 * k - 1.0, -2.0 * k + 0.0), // no -0 endpoint
        ExtremumKind::PositiveMin => (-2.0 * k - 2.0, -2.0 * k - 1.0),
    };
    let location = digamma_root(interval.0 + POLE_INSET, interval.1 - POLE_INSET)?;
    Ok(ExtremumRecord {
        n,
        interval,
        location,
        value: real_gamma(location)?,
        kind,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendReport {
    pub maxima: Vec<ExtremumRecord>,
    pub minima: Vec<ExtremumRecord>,
    /// `|M_n|` strictly decreasing.
    pub maxima_decreasing: bool,
    /// `m_n` strictly decreasing.
    pub minima_decreasing: bool,
    /// Every `M_n < 0` and every `m_n > 0`.
    pub signs_ok: bool,
    /// `max(|M_N|, m_N)`.
    pub final_bound: f64,
}

impl TrendReport {
    pub fn holds(&self) -> bool {
        self.maxima_decreasing && self.minima_decreasing && self.signs_ok
    }
}

/// `M_0..M_N` and `m_0..m_N` with the monotonicity and sign checks.
pub fn extrema_trend(big_n: u32) -> Result<TrendReport> {
    if big_n < 2 {
        return Err(Error::domain("extrema_trend needs N >= 2"));
    }
    let collect = |kind| -> Result<Vec<ExtremumRecord>> {
        (0..=big_n)
            .into_par_iter()
            .map(|n| negative_axis_extremum(n, kind))
            .collect()
    };
    let maxima = collect(ExtremumKind::NegativeMax)?;
    let minima = collect(ExtremumKind::PositiveMin)?;
    let decreasing = |v: &[ExtremumRecord]| v.windows(2).all(|w| w[1].value.abs() < w[0].value.abs());
    let signs_ok = maxima.iter().all(|r| r.value < 0.0) && minima.iter().all(|r| r.value > 0.0);
    let final_bound = maxima.last().unwrap().value.abs().max(minima.last().unwrap().value);
    Ok(TrendReport {
        maxima_decreasing: decreasing(&maxima),
        minima_decreasing: decreasing(&minima),
        signs_ok,
        final_bound,
        maxima,
        minima,
    })
}

/// Location and value of the minimum of Gamma on the positive axis.
pub fn positive_axis_min() -> Result<(f64, f64)> {
    let x = digamma_root(1.0, 2.0)?;
    Ok((x, real_gamma(x)?))
}

/// Bisection for `Gamma(x) = y` on `[a, b]` where `Gamma - y` changes sign.
fn solve_on(a: f64, b: f64, y: f64) -> Result<f64> {
    let f = |x: f64| real_gamma(x).map(|g| g - y);
    let (mut lo, mut hi) = (a, b);
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::NumericalFailure(format!(
            "no sign change of Gamma - {y} on [{a}, {b}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo)?.abs() <= f(hi)?.abs() { lo } else { hi })
}

/// Moves from `critical` toward `pole` until `|Gamma|` exceeds `|y|`.
fn pole_bracket(pole: f64, critical: f64, y: f64) -> Result<f64> {
    let dir = (critical - pole).signum();
    let mut d = 0.25 * (critical - pole).abs();
    for _ in 0..60 {
        let x = pole + dir * d;
        if x != pole && real_gamma(x)?.abs() > y.abs() {
            return Ok(x);
        }
        d *= 0.125;
    }
    Err(Error::NumericalFailure(format!(
        "no bracket for {y} next to pole {pole}"
    )))
}

/// Some `x` outside the poles with `Gamma(x) = y`.
///
/// Values at or above the positive minimum are taken on the increasing
/// branch to the right of it; smaller positive and all negative values are
/// found on the first negative interval whose extremum passes `y`.
pub fn preimage_on_real_axis(y: f64) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::domain("Gamma does not attain 0 on the real axis"));
    }
    let (xmin, gmin) = positive_axis_min()?;
    let x = if y >= gmin {
        if y > real_gamma(PREIMAGE_CAP)? {
            return Err(Error::domain(format!("{y} exceeds Gamma({PREIMAGE_CAP})")));
        }
        if y == gmin {
            xmin
        } else {
            solve_on(xmin, PREIMAGE_CAP, y)?
        }
    } else {
        let kind = if y > 0.0 {
            ExtremumKind::PositiveMin
        } else {
            ExtremumKind::NegativeMax
        };
        let mut found = None;
        for n in 0..=170 {
            let rec = negative_axis_extremum(n, kind)?;
            let passes = if y > 0.0 { rec.value <= y } else { rec.value >= y };
            if passes {
                found = Some(rec);
                break;
            }
        }
        let rec = found.ok_or_else(|| Error::domain(format!("{y} is below every extremum searched")))?;
        if rec.value == y {
            rec.location
        } else {
            let left = pole_bracket(rec.interval.0, rec.location, y)?;
            solve_on(left, rec.location, y)?
        }
    };
    let g = real_gamma(x)?;
    if (g - y).abs() > 1e-9 * y.abs().max(1.0) {
        return Err(Error::NumericalFailure(format!("preimage of {y}: Gamma({x}) = {g}")));
    }
    Ok(x)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub targets: usize,
    pub solved: usize,
    /// Largest `|Gamma(x) - y| / max(1, |y|)` among solved targets.
    pub max_residual: f64,
    pub failures: Vec<(f64, String)>,
}

/// Solves `Gamma(x) = y` for `count` targets log-uniform in `+-[1e-4, 1e4]`.
pub fn surjectivity_sweep(count: usize, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<f64> = (0..count)
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-4.0..=4.0));
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let results: Vec<(f64, Result<f64>)> = targets.par_iter().map(|&y| (y, preimage_on_real_axis(y))).collect();
    let mut rep = SweepReport {
        targets: count,
        solved: 0,
        max_residual: 0.0,
        failures: Vec::new(),
    };
    for (y, r) in results {
        match r.and_then(real_gamma) {
            Ok(g) => {
                rep.solved += 1;
                rep.max_residual = rep.max_residual.max((g - y).abs() / y.abs().max(1.0));
            }
            Err(e) => rep.failures.push((y, e.to_string())),
        }
    }
    rep
}

/// `ln sinh(a)` for `a > 0` without overflow.
fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - LN_2 + (-(-2.0 * a).exp()).ln_1p()
    } else {
        a.sinh().ln()
    }
}

/// Relative deviation of `|Gamma(it)|^2` from `pi / (t sinh(pi t))`,
/// computed in log space.
pub fn modulus_identity_residual(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("modulus identity needs t > 0"));
    }
    let lhs = 2.0 * log_gamma(Complex64::new(0.0, t))?.re;
    let rhs = PI.ln() - t.ln() - ln_sinh(PI * t);
    Ok((lhs - rhs).exp_m1().abs())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpiralReport {
    pub t_max: f64,
    pub step: f64,
    pub count: usize,
    /// `(T ln T - T) / pi`.
    pub predicted: f64,
    /// Refined zeros of `Im Gamma(it)`.
    pub crossings: Vec<f64>,
}

/// Sign changes of `Im Gamma(it)` on `(0.1, T]`, each refined by bisection.
pub fn spiral_crossings(t_max: f64, step: f64) -> Result<SpiralReport> {
    if !(t_max > 1.0) {
        return Err(Error::domain("spiral scan needs T > 1"));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::domain("spiral scan needs 0 < step <= 1e-2"));
    }
    let im = |t: f64| gamma(Complex64::new(0.0, t)).map(|g| g.im);
    let t0 = 0.1;
    let n = ((t_max - t0) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| (t0 + k as f64 * step).min(t_max)).collect();
    let vals: Vec<f64> = grid.par_iter().map(|&t| im(t)).collect::<Result<_>>()?;
    let mut crossings = Vec::new();
    for k in 0..n {
        let (a, b) = (vals[k], vals[k + 1]);
        if b == 0.0 && grid[k + 1] > t0 {
            crossings.push(grid[k + 1]);
            continue;
        }
        if a * b < 0.0 {
            let (mut lo, mut hi, flo) = (grid[k], grid[k + 1], a);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = im(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    Ok(SpiralReport {
        t_max,
        step,
        count: crossings.len(),
        predicted: (t_max * t_max.ln() - t_max) / PI,
        crossings,
    })
}

/// `Im log Gamma(it) / (t ln t)` along the continuously unwound branch.
pub fn spiral_argument_ratio(t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::domain("argument ratio needs t > 1"));
    }
    Ok(log_gamma_along_ray(t)?.im / (t * t.ln()))
}

/// `(t, Re Gamma(it), Im Gamma(it))` samples on `[t0, t1]`.
pub fn spiral_track(t0: f64, t1: f64, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    if !(t0 > 0.0 && t1 > t0) || samples < 2 {
        return Err(Error::domain("spiral track needs 0 < t0 < t1 and at least 2 samples"));
    }
    (0..samples)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / (samples - 1) as f64;
            gamma(Complex64::new(0.0, t)).map(|g| (t, g.re, g.im))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Golden-section extremum of `sign * Gamma` on `(a, b)` after a dense scan.
    fn golden_oracle(a: f64, b: f64, sign: f64) -> (f64, f64) {
        let f = |x: f64| sign * real_gamma(x).unwrap();
        let n = 20_000;
        let mut best = a + (b - a) / n as f64;
        for k in 1..n {
            let x = a + (b - a) * k as f64 / n as f64;
            if f(x) < f(best) {
                best = x;
            }
        }
        let h = (b - a) / n as f64;
        let (mut lo, mut hi) = (best - h, best + h);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = hi - r * (hi - lo);
            let d = lo + r * (hi - lo);
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        let x = 0.5 * (lo + hi);
        (x, real_gamma(x).unwrap())
    }

    #[test]
    fn first_negative_maximum() {
        let r = negative_axis_extremum(0, ExtremumKind::NegativeMax).unwrap();
        let (x, v) = golden_oracle(-1.0, 0.0, -1.0);
        assert!((r.location - x).abs() < 1e-6, "{} vs {x}", r.location);
        assert!((r.value - v).abs() < 1e-10);
        assert!((r.location + 0.5041).abs() < 1e-4);
        assert!((r.value + 3.5446).abs() < 1e-4);
        assert!(digamma(r.location).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn first_positive_minimum() {
        let r = negative_axis_extremum(0, ExtremumKind::PositiveMin).unwrap();
        let (x, v) = golden_oracle(-2.0, -1.0, 1.0);
        assert!(r.location > -2.0 && r.location < -1.0);
        assert!((r.location - x).abs() < 1e-6);
        assert!((r.value - v).abs() < 1e-10);
    }

    #[test]
    fn record_invariants() {
        for n in 0..8 {
            for kind in [ExtremumKind::NegativeMax, ExtremumKind::PositiveMin] {
                let r = negative_axis_extremum(n, kind).unwrap();
                assert!(r.location > r.interval.0 && r.location < r.interval.1);
                assert!(digamma(r.location).unwrap().abs() <= 1e-9, "{r:?}");
                match kind {
                    ExtremumKind::NegativeMax => assert!(r.value < 0.0),
                    ExtremumKind::PositiveMin => assert!(r.value > 0.0),
                }
            }
        }
    }

    #[test]
    fn trend() {
        let t = extrema_trend(5).unwrap();
        assert!(t.holds());
        assert!(t.minima[5].value < 1e-2);
        assert!(extrema_trend(2).unwrap().minima.iter().all(|r| r.value > 0.0));
        assert!(extrema_trend(1).is_err());
    }

    #[test]
    fn positive_minimum() {
        let (x, v) = positive_axis_min().unwrap();
        assert!((0.88..=0.89).contains(&v));
        assert!(x > 1.46 && x < 1.47);
        assert!(real_gamma(x - 1e-3).unwrap() > v && real_gamma(x + 1e-3).unwrap() > v);
    }

    #[test]
    fn preimages() {
        assert!((preimage_on_real_axis(24.0).unwrap() - 5.0).abs() < 1e-9);
        let x = preimage_on_real_axis(-1.0).unwrap();
        assert!(x > -3.0 && x < -2.0, "{x}");
        assert!((real_gamma(x).unwrap() + 1.0).abs() < 1e-9);
        let x = preimage_on_real_axis(0.5).unwrap();
        assert!(x < 0.0);
        assert!((real_gamma(x).unwrap() - 0.5).abs() < 1e-9);
        assert!(matches!(preimage_on_real_axis(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sweep_small() {
        let r = surjectivity_sweep(100, 7);
        assert_eq!(r.solved, 100, "{:?}", r.failures);
        assert!(r.max_residual <= 1e-9);
    }

    #[test]
    fn modulus_identity() {
        assert!(modulus_identity_residual(1.0).unwrap() <= 1e-10);
        assert!(modulus_identity_residual(0.1).unwrap() <= 1e-10);
        assert!(modulus_identity_residual(15.0).unwrap() <= 1e-8);
        assert!(modulus_identity_residual(300.0).unwrap() <= 1e-8);
        assert!(modulus_identity_residual(0.0).is_err());
    }

    #[test]
    fn crossings() {
        let r = spiral_crossings(40.0, 1e-2).unwrap();
        assert!((r.predicted - 34.2).abs() < 0.1);
        assert!(
            (r.count as f64 - r.predicted).abs() <= 0.2 * r.predicted,
            "{} vs {}",
            r.count,
            r.predicted
        );
        for &t in &r.crossings {
            let g = gamma(Complex64::new(0.0, t)).unwrap();
            assert!(g.im.abs() <= 1e-9 && g.norm() > 0.0);
        }
        let c20 = spiral_crossings(20.0, 1e-2).unwrap().count;
        assert!(r.count > c20);
    }

    #[test]
    fn argument_ratio() {
        let r3 = spiral_argument_ratio(1e3).unwrap();
        let r4 = spiral_argument_ratio(1e4).unwrap();
        let r2 = spiral_argument_ratio(1e2).unwrap();
        assert!((0.85..=1.0).contains(&r3), "{r3}");
        assert!(r2 < r3 && r3 < r4 && r4 <= 1.0);
    }
}
