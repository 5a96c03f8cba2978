//! Numerical detection of algebraic relations among image points, and the
//! weak-bialgebraicity pipeline built on it.
//!
//! A real curve is traced, pushed through `G`, and the image is tested for
//! membership in a curve of bounded degree by the smallest singular value of
//! a monomial design matrix.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{in_pole_set, G};
use crate::irreducible::probable_irreducibility;
use crate::poly::RationalPoly2;
use crate::trace::{find_seed_points, trace_real_locus_with, CurveSampleSet, Direction, Rect, TraceOptions};

/// Verdict threshold on `sigma_min / sigma_max`.
pub const RANK_TAU: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitVerdict {
    OnCurve,
    NotOnCurve,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankReport {
    pub degree: usize,
    /// Exponent pairs `(a, b)` of `U^a V^b`, by total degree then descending `a`.
    pub monomial_basis: Vec<(u32, u32)>,
    pub sample_count: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub ratio: f64,
    pub verdict: FitVerdict,
    /// Unit-norm coefficients over `monomial_basis` in the original
    /// coordinates; present iff `verdict` is `OnCurve`.
    pub relation: Option<Vec<f64>>,
}

impl RankReport {
    /// Evaluates the recovered relation at `(u, v)`.
    pub fn relation_value(&self, u: f64, v: f64) -> Option<f64> {
        let rel = self.relation.as_ref()?;
        Some(
            self.monomial_basis
                .iter()
                .zip(rel)
                .map(|(&(a, b), c)| c * u.powi(a as i32) * v.powi(b as i32))
                .sum(),
        )
    }
}

pub fn monomial_basis(degree: usize) -> Vec<(u32, u32)> {
    let d = degree as u32;
    (0..=d).flat_map(|k| (0..=k).map(move |b| (k - b, b))).collect()
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ImageSet {
    pub points: Vec<(f64, f64)>,
    /// Inputs lying in `S`.
    pub dropped_poles: usize,
    /// Inputs whose image leaves the double range.
    pub dropped_overflow: usize,
}

impl ImageSet {
    pub fn dropped(&self) -> usize {
        self.dropped_poles + self.dropped_overflow
    }
}

/// Applies `G` to every traced point, dropping points of `S`.
pub fn image_samples(samples: &CurveSampleSet) -> Result<ImageSet> {
    image_points(&samples.points)
}

pub fn image_points(points: &[(f64, f64)]) -> Result<ImageSet> {
    let mut out = ImageSet::default();
    for &(x, y) in points {
        if in_pole_set(x, y) {
            out.dropped_poles += 1;
            continue;
        }
        match G(x, y) {
            Ok(p) => out.points.push(p),
            Err(Error::Pole { .. }) => out.dropped_poles += 1,
            Err(_) => out.dropped_overflow += 1,
        }
    }
    if out.points.is_empty() {
        return Err(Error::EmptyImage { dropped: out.dropped() });
    }
    Ok(out)
}

/// Rank test for a relation of total degree `degree` among `points`.
pub fn fit_algebraic_relation(points: &[(f64, f64)], degree: usize) -> Result<RankReport> {
    let basis = monomial_basis(degree);
    let needed = 3 * basis.len();
    if points.len() < needed {
        return Err(Error::InsufficientSamples {
            degree,
            needed,
            got: points.len(),
        });
    }
    let (cu, su) = center_scale(points.iter().map(|p| p.0));
    let (cv, sv) = center_scale(points.iter().map(|p| p.1));
    if su == 0.0 && sv == 0.0 {
        return Err(Error::DegenerateInput);
    }
    // a constant coordinate stays exactly zero after centering
    let su = if su == 0.0 { 1.0 } else { su };
    let sv = if sv == 0.0 { 1.0 } else { sv };

    let n = points.len();
    let m = basis.len();
    let mut a = DMatrix::<f64>::zeros(n, m);
    for (r, &(u, v)) in points.iter().enumerate() {
        let (u, v) = ((u - cu) / su, (v - cv) / sv);
        let up = powers(u, degree);
        let vp = powers(v, degree);
        for (c, &(i, j)) in basis.iter().enumerate() {
            a[(r, c)] = up[i as usize] * vp[j as usize];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let smax = singular_values[0];
    let smin = *singular_values.last().unwrap();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    let verdict = if ratio < RANK_TAU {
        FitVerdict::OnCurve
    } else {
        FitVerdict::NotOnCurve
    };
    let relation = (verdict == FitVerdict::OnCurve).then(|| {
        let k = *order.last().unwrap();
        let scaled: Vec<f64> = (0..m).map(|c| v_t[(k, c)]).collect();
        unscale_relation(&basis, &scaled, (cu, su), (cv, sv))
    });
    Ok(RankReport {
        degree,
        monomial_basis: basis,
        sample_count: n,
        singular_values,
        ratio,
        verdict,
        relation,
    })
}

fn center_scale(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    (0.5 * (lo + hi), 0.5 * (hi - lo))
}

fn powers(x: f64, d: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(d + 1);
    let mut acc = 1.0;
    for _ in 0..=d {
        p.push(acc);
        acc *= x;
    }
    p
}

fn binomial_expand(center: f64, scale: f64, a: u32) -> Vec<f64> {
    // ((t - center) / scale)^a as ascending coefficients in t
    let mut c = vec![1.0];
    for _ in 0..a {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &v) in c.iter().enumerate() {
            next[k + 1] += v / scale;
            next[k] -= v * center / scale;
        }
        c = next;
    }
    c
}

/// Rewrites a relation in scaled coordinates as one in the original
/// coordinates, normalized to unit length with a positive largest entry.
fn unscale_relation(basis: &[(u32, u32)], coeffs: &[f64], u: (f64, f64), v: (f64, f64)) -> Vec<f64> {
    let mut acc: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (&(a, b), &c) in basis.iter().zip(coeffs) {
        let eu = binomial_expand(u.0, u.1, a);
        let ev = binomial_expand(v.0, v.1, b);
        for (i, x) in eu.iter().enumerate() {
            for (j, y) in ev.iter().enumerate() {
                *acc.entry((i as u32, j as u32)).or_insert(0.0) += c * x * y;
            }
        }
    }
    let mut out: Vec<f64> = basis.iter().map(|e| acc.get(e).copied().unwrap_or(0.0)).collect();
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    let big = out
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    let s = if big < 0.0 { -norm } else { norm };
    if s != 0.0 {
        out.iter_mut().for_each(|x| *x /= s);
    }
    out
}

/// Settings for [`weak_bialg_verdict`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BialgConfig {
    /// Minimum image samples required; defaults to ten times the basis size
    /// at the largest degree.
    pub min_samples: Option<usize>,
    /// Samples are thinned evenly down to this many.
    pub max_samples: usize,
    /// Trace step; defaults to the box diagonal over 400.
    pub step: Option<f64>,
    pub grid_n: usize,
    pub max_seeds: usize,
    pub steps_per_trace: usize,
    /// Image points with `|G| > magnitude_cap` are discarded before fitting.
    pub magnitude_cap: f64,
    pub irreducibility_trials: usize,
}

impl Default for BialgConfig {
    fn default() -> Self {
        Self {
            min_samples: None,
            max_samples: 4000,
            step: None,
            grid_n: 24,
            max_seeds: 64,
            steps_per_trace: 20_000,
            magnitude_cap: 1e6,
            irreducibility_trials: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BialgVerdict {
    WeaklyBialgebraic,
    NotWeaklyBialgebraic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BialgReport {
    pub poly: String,
    pub rect: Rect,
    pub max_degree: usize,
    pub verdict: BialgVerdict,
    /// Lowest degree with an `OnCurve` fit.
    pub degree: Option<usize>,
    pub ratios: Vec<(usize, f64)>,
    pub fits: Vec<RankReport>,
    pub relation: Option<Vec<f64>>,
    pub seeds: usize,
    pub traced_points: usize,
    pub dropped_poles: usize,
    pub dropped_overflow: usize,
    pub dropped_large: usize,
    pub sample_count: usize,
    pub truncated_traces: usize,
    pub irreducibility: String,
    pub notes: Vec<String>,
}

/// Traces the real locus of `poly` inside `rect`, maps it through `G` and
/// runs the rank test at every degree `1..=max_degree`.
pub fn weak_bialg_verdict(
    poly: &RationalPoly2,
    rect: Rect,
    max_degree: usize,
    config: &BialgConfig,
) -> Result<BialgReport> {
    if poly.is_constant() {
        return Err(Error::Degenerate(format!("'{poly}' is constant")));
    }
    if max_degree == 0 {
        return Err(Error::domain("max_degree must be at least 1"));
    }
    let basis_len = monomial_basis(max_degree).len();
    let min_samples = config.min_samples.unwrap_or(10 * basis_len).max(3 * basis_len);
    let diag = (rect.xmax - rect.xmin).hypot(rect.ymax - rect.ymin);
    let h = config.step.unwrap_or(diag / 400.0);

    let seeds = find_seed_points(poly, rect, config.grid_n)?;
    let seeds: Vec<_> = spread(&seeds, config.max_seeds);

    let traces: Vec<Result<CurveSampleSet>> = seeds
        .par_iter()
        .flat_map_iter(|&s| {
            [Direction::Forward, Direction::Backward].into_iter().map(move |d| {
                trace_real_locus_with(
                    poly,
                    s,
                    config.steps_per_trace,
                    h,
                    TraceOptions {
                        direction: d,
                        bounds: Some(rect),
                        stop_on_close: true,
                    },
                )
            })
        })
        .collect();

    let mut traced: Vec<(f64, f64)> = Vec::new();
    let mut truncated = 0;
    let mut first_err = None;
    for t in traces {
        match t {
            Ok(t) => {
                truncated += t.truncated as usize;
                traced.extend(t.points);
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if traced.is_empty() {
        return Err(first_err.unwrap_or(Error::NoRealPoints));
    }
    let traced_points = traced.len();
    let image = image_points(&traced)?;
    let cap = config.magnitude_cap;
    let kept: Vec<(f64, f64)> = image.points.iter().copied().filter(|p| p.0.hypot(p.1) <= cap).collect();
    let dropped_large = image.points.len() - kept.len();
    let samples = spread(&kept, config.max_samples);
    if samples.len() < min_samples {
        return Err(Error::InsufficientSamples {
            degree: max_degree,
            needed: min_samples,
            got: samples.len(),
        });
    }

    let fits: Vec<RankReport> = (1..=max_degree)
        .into_par_iter()
        .map(|d| fit_algebraic_relation(&samples, d))
        .collect::<Result<_>>()?;
    let hit = fits.iter().find(|f| f.verdict == FitVerdict::OnCurve);
    let irreducibility = probable_irreducibility(poly, config.irreducibility_trials);

    let mut notes = vec![format!(
        "OnCurve iff sigma_min/sigma_max < {RANK_TAU:e}; the threshold is an empirical calibration"
    )];
    notes.push("irreducibility over C is assumed, not certified".into());
    if truncated > 0 {
        notes.push(format!("{truncated} traces stopped at singular points"));
    }

    Ok(BialgReport {
        poly: poly.to_string(),
        rect,
        max_degree,
        verdict: if hit.is_some() {
            BialgVerdict::WeaklyBialgebraic
        } else {
            BialgVerdict::NotWeaklyBialgebraic
        },
        degree: hit.map(|f| f.degree),
        relation: hit.and_then(|f| f.relation.clone()),
        ratios: fits.iter().map(|f| (f.degree, f.ratio)).collect(),
        fits,
        seeds: seeds.len(),
        traced_points,
        dropped_poles: image.dropped_poles,
        dropped_overflow: image.dropped_overflow,
        dropped_large,
        sample_count: samples.len(),
        truncated_traces: truncated,
        irreducibility: irreducibility.label().to_string(),
        notes,
    })
}

/// Evenly spaced subsequence of at most `k` elements.
fn spread<T: Copy>(v: &[T], k: usize) -> Vec<T> {
    if v.len() <= k || k == 0 {
        return v.to_vec();
    }
    (0..k).map(|i| v[i * v.len() / k]).collect()
}

/// Polynomial with Gaussian-rational coefficients `re + i im`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GaussianPoly2 {
    terms: BTreeMap<(u32, u32), (BigRational, BigRational)>,
}

impl GaussianPoly2 {
    /// `re + i * im`.
    pub fn new(re: &RationalPoly2, im: &RationalPoly2) -> Self {
        let mut terms: BTreeMap<(u32, u32), (BigRational, BigRational)> = BTreeMap::new();
        for (e, c) in re.terms() {
            terms
                .entry(*e)
                .or_insert_with(|| (BigRational::zero(), BigRational::zero()))
                .0 = c.clone();
        }
        for (e, c) in im.terms() {
            terms
                .entry(*e)
                .or_insert_with(|| (BigRational::zero(), BigRational::zero()))
                .1 = c.clone();
        }
        Self { terms }
    }

    pub fn real(p: &RationalPoly2) -> Self {
        Self::new(p, &RationalPoly2::zero())
    }

    fn get(&self, i: u32, j: u32) -> Option<&(BigRational, BigRational)> {
        self.terms.get(&(i, j))
    }

    fn support(&self) -> Vec<(u32, u32)> {
        self.terms.keys().copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialKind {
    Diagonal,
    Vertical,
    Horizontal,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrivialClass {
    pub kind: TrivialKind,
    /// Exact `w = (re, im)` for `Vertical` and `Horizontal`.
    pub w: Option<(BigRational, BigRational)>,
}

impl TrivialClass {
    pub fn w_complex(&self) -> Option<Complex64> {
        self.w
            .as_ref()
            .map(|(a, b)| Complex64::new(a.to_f64().unwrap_or(f64::NAN), b.to_f64().unwrap_or(f64::NAN)))
    }
}

fn cdiv(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let den = &b.0 * &b.0 + &b.1 * &b.1;
    ((&a.0 * &b.0 + &a.1 * &b.1) / &den, (&a.1 * &b.0 - &a.0 * &b.1) / &den)
}

/// Matches `C` exactly against `X - Y`, `X - w` and `Y - w` up to a scalar.
pub fn classify_trivial(c: &GaussianPoly2) -> TrivialClass {
    let none = TrivialClass {
        kind: TrivialKind::None,
        w: None,
    };
    let support = c.support();
    let only = |allowed: &[(u32, u32)]| support.iter().all(|e| allowed.contains(e));
    if support == [(0, 1), (1, 0)] {
        let (a, b) = (c.get(1, 0).unwrap(), c.get(0, 1).unwrap());
        if a.0 == -b.0.clone() && a.1 == -b.1.clone() {
            return TrivialClass {
                kind: TrivialKind::Diagonal,
                w: None,
            };
        }
        return none;
    }
    let linear_in = |e: (u32, u32), kind| -> Option<TrivialClass> {
        if !only(&[e, (0, 0)]) {
            return None;
        }
        let lead = c.get(e.0, e.1)?;
        let zero = (BigRational::zero(), BigRational::zero());
        let c0 = c.get(0, 0).unwrap_or(&zero);
        let w = cdiv(c0, lead);
        Some(TrivialClass {
            kind,
            w: Some((-w.0, -w.1)),
        })
    };
    linear_in((1, 0), TrivialKind::Vertical)
        .or_else(|| linear_in((0, 1), TrivialKind::Horizontal))
        .unwrap_or(none)
}
