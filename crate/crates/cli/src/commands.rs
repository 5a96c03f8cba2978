use std::time::Instant;

use gamma_bialg::axis::{
    extrema_trend, modulus_identity_residual, positive_axis_min, spiral_argument_ratio, spiral_crossings, spiral_track,
    surjectivity_sweep,
};
use gamma_bialg::detector::{weak_bialg_verdict, BialgConfig};
use gamma_bialg::factorial::{
    classify_factorial_curve, default_primes, estimate_growth_exponent, is_prime, monomial_valuations,
};
use gamma_bialg::gamma::{self as special, G};
use gamma_bialg::poly::{parse_curve, parse_poly};
use gamma_bialg::puiseux::{branch_residual, branches_at_infinity, expand_branch, fmt_ratio, residuals_decay};
use gamma_bialg::{Error, Rect};
use num_complex::Complex64;
use serde::Serialize;

use crate::output::{emit, fmt_f64, to_csv, to_json, Envelope};
use crate::{
    AxisArgs, BialgArgs, Cli, FactorialArgs, Failure, Format, Func, GammaArgs, Global, PuiseuxArgs, SpiralArgs,
    UsageError,
};

type Table = (Vec<&'static str>, Vec<Vec<String>>);

fn write(g: &Global, bytes: &[u8]) -> Result<(), Failure> {
    emit(g.output.as_deref(), bytes).map_err(|e| UsageError(format!("cannot write output: {e}")).into())
}

/// Emits `result` as JSON or `table` as CSV.
fn finish<R: Serialize>(
    g: &Global,
    cli: &Cli,
    name: &str,
    start: Instant,
    result: &R,
    table: Table,
) -> Result<(), Failure> {
    let elapsed = (!g.no_timing).then(|| start.elapsed());
    let bytes = match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&Envelope::new(name, cli, result, elapsed)).map_err(|e| UsageError(e.to_string()))?,
        Format::Csv => to_csv(&table.0, &table.1).map_err(|e| UsageError(e.to_string()))?,
        Format::Text => return Err(UsageError(format!("text output is not available for '{name}'")).into()),
    };
    write(g, &bytes)
}

/// `a+bi` with the shortest round-trip digits.
fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

#[derive(Serialize)]
struct GammaRow {
    x: f64,
    y: f64,
    re: Option<f64>,
    im: Option<f64>,
    error: Option<String>,
}

fn evaluate(func: Func, x: f64, y: f64) -> gamma_bialg::Result<Complex64> {
    let z = Complex64::new(x, y);
    match func {
        Func::Gamma => special::gamma(z),
        Func::LogGamma => special::log_gamma(z),
        Func::G => G(x, y).map(|(u, v)| Complex64::new(u, v)),
    }
}

pub fn gamma(g: &Global, a: &GammaArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let mut rows = Vec::new();
    // explicit points abort on the first domain error
    for &[x, y] in &a.z {
        let v = evaluate(a.func, x, y)?;
        rows.push(GammaRow {
            x,
            y,
            re: Some(v.re),
            im: Some(v.im),
            error: None,
        });
    }
    if let Some(grid) = a.grid {
        let coord = |lo: f64, hi: f64, n: usize, k: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let (x, y) = (
                    coord(grid.xmin, grid.xmax, grid.nx, ix),
                    coord(grid.ymin, grid.ymax, grid.ny, iy),
                );
                rows.push(match evaluate(a.func, x, y) {
                    Ok(v) => GammaRow {
                        x,
                        y,
                        re: Some(v.re),
                        im: Some(v.im),
                        error: None,
                    },
                    Err(e) => GammaRow {
                        x,
                        y,
                        re: None,
                        im: None,
                        error: Some(e.to_string()),
                    },
                });
            }
        }
    }
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let table = (
        vec!["x", "y", "re", "im", "error"],
        rows.iter()
            .map(|r| {
                vec![
                    fmt_f64(r.x),
                    fmt_f64(r.y),
                    opt(r.re),
                    opt(r.im),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    );
    if g.format.unwrap_or(Format::Text) == Format::Text {
        let mut text = String::new();
        for r in &rows {
            match (r.re, r.im, &r.error) {
                (Some(re), Some(im), _) => text.push_str(&fmt_complex(Complex64::new(re, im))),
                (_, _, Some(e)) => text.push_str(&format!("error: {e}")),
                _ => unreachable!(),
            }
            text.push('\n');
        }
        return write(g, text.as_bytes());
    }
    finish(g, cli, "gamma", start, &rows, table)
}

pub fn bialg(g: &Global, a: &BialgArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let poly = parse_curve(&a.poly)?;
    let [xmin, xmax, ymin, ymax] = a.rect;
    let config = BialgConfig {
        min_samples: a.min_samples,
        max_samples: a.samples,
        step: a.step,
        grid_n: a.grid_n,
        max_seeds: a.max_seeds,
        steps_per_trace: a.steps_per_trace,
        magnitude_cap: a.magnitude_cap,
        irreducibility_trials: a.irreducibility_trials,
    };
    if a.step.is_some_and(|h| !(h > 0.0)) || !(a.magnitude_cap > 0.0) {
        return Err(UsageError("--step and --magnitude-cap must be positive".into()).into());
    }
    let report = weak_bialg_verdict(&poly, Rect::new(xmin, xmax, ymin, ymax), a.max_degree, &config)?;
    let table = (
        vec!["degree", "ratio", "verdict"],
        report
            .fits
            .iter()
            .map(|f| vec![f.degree.to_string(), fmt_f64(f.ratio), format!("{:?}", f.verdict)])
            .collect(),
    );
    finish(g, cli, "bialg", start, &report, table)
}

#[derive(Serialize)]
struct AxisResult {
    positive_min: PositiveMin,
    trend: gamma_bialg::TrendReport,
    sweep: gamma_bialg::SweepReport,
    modulus: ModulusCheck,
}

#[derive(Serialize)]
struct PositiveMin {
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct ModulusCheck {
    t_min: f64,
    t_max: f64,
    points: usize,
    max_relative_deviation: f64,
}

pub fn axis(g: &Global, a: &AxisArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    if a.modulus_points < 2 {
        return Err(UsageError("--modulus-points must be at least 2".into()).into());
    }
    let (x, value) = positive_axis_min()?;
    let trend = extrema_trend(a.n_max)?;
    let sweep = surjectivity_sweep(a.sweep, g.seed);
    let mut worst = 0.0f64;
    for k in 0..a.modulus_points {
        let t = 0.1 + 19.9 * k as f64 / (a.modulus_points - 1) as f64;
        worst = worst.max(modulus_identity_residual(t)?);
    }
    let rows = trend
        .maxima
        .iter()
        .chain(&trend.minima)
        .map(|r| {
            vec![
                r.n.to_string(),
                format!("{:?}", r.kind),
                fmt_f64(r.interval.0),
                fmt_f64(r.interval.1),
                fmt_f64(r.location),
                fmt_f64(r.value),
            ]
        })
        .collect();
    let result = AxisResult {
        positive_min: PositiveMin { x, value },
        trend,
        sweep,
        modulus: ModulusCheck {
            t_min: 0.1,
            t_max: 20.0,
            points: a.modulus_points,
            max_relative_deviation: worst,
        },
    };
    finish(
        g,
        cli,
        "axis",
        start,
        &result,
        (vec!["n", "kind", "left", "right", "location", "value"], rows),
    )
}

#[derive(Serialize)]
struct SpiralResult {
    t_max: f64,
    step: f64,
    count: usize,
    predicted: f64,
    relative_error: f64,
    /// Count within 20% of the prediction.
    within_tolerance: bool,
    crossings: Vec<f64>,
    ratios: Vec<(f64, f64)>,
}

pub fn spiral(g: &Global, a: &SpiralArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let rep = spiral_crossings(a.t_max, a.step)?;
    let ratios = a
        .ratio_t
        .iter()
        .map(|&t| spiral_argument_ratio(t).map(|r| (t, r)))
        .collect::<Result<Vec<_>, Error>>()?;
    if let Some(path) = &a.track {
        let track = spiral_track(a.track_from, a.track_to.unwrap_or(a.t_max), a.track_samples)?;
        let rows: Vec<Vec<String>> = track
            .iter()
            .map(|&(t, re, im)| vec![fmt_f64(t), fmt_f64(re), fmt_f64(im)])
            .collect();
        let bytes = to_csv(&["t", "re", "im"], &rows).map_err(|e| UsageError(e.to_string()))?;
        emit(Some(path), &bytes).map_err(|e| UsageError(format!("cannot write track: {e}")))?;
    }
    let relative_error = (rep.count as f64 - rep.predicted).abs() / rep.predicted;
    let rows = rep
        .crossings
        .iter()
        .enumerate()
        .map(|(k, t)| vec![(k + 1).to_string(), fmt_f64(*t)])
        .collect();
    let result = SpiralResult {
        t_max: rep.t_max,
        step: rep.step,
        count: rep.count,
        predicted: rep.predicted,
        relative_error,
        within_tolerance: relative_error <= 0.2,
        crossings: rep.crossings,
        ratios,
    };
    finish(g, cli, "spiral", start, &result, (vec!["index", "t"], rows))
}

#[derive(Serialize)]
struct FactorialResult {
    poly: String,
    /// Set when rational coefficients were cleared to integers.
    scaled_to: Option<String>,
    classification: gamma_bialg::FactorialClassification,
    primes: Vec<u64>,
    certificates: Vec<gamma_bialg::ValuationCertificate>,
    /// Every certificate has at least two monomials tied at the minimum.
    certificate_law_holds: bool,
    growth: Option<gamma_bialg::GrowthEstimate>,
    growth_note: Option<String>,
}

pub fn factorial(g: &Global, a: &FactorialArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let parsed = parse_curve(&a.poly)?;
    let n_max = a.n_max.unwrap_or(a.m_max);
    for v in [a.m_max, n_max] {
        if v > a.cap {
            return Err(Error::CapExceeded { n: v, cap: a.cap }.into());
        }
    }
    let (poly, scaled_to) = if parsed.has_integer_coefficients() {
        (parsed, None)
    } else {
        let p = parsed.primitive_integer();
        let s = p.to_string();
        (p, Some(s))
    };
    let primes = match &a.primes {
        Some(ps) => {
            if let Some(bad) = ps.iter().find(|&&p| !is_prime(p)) {
                return Err(UsageError(format!("{bad} is not prime")).into());
            }
            ps.clone()
        }
        None => default_primes(a.m_max.max(2)),
    };
    let classification = classify_factorial_curve(&poly, a.m_max, n_max, a.threshold)?;
    let mut certificates = Vec::new();
    for pt in &classification.points {
        for &p in &primes {
            certificates.push(monomial_valuations(&poly, p, pt)?);
        }
    }
    let certificate_law_holds = certificates.iter().all(|c| c.argmin_set.len() >= 2);
    let (growth, growth_note) = if classification.points.len() >= 3 {
        match estimate_growth_exponent(&classification.points) {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("fewer than 3 points; no growth fit".into()))
    };
    let rows = classification
        .points
        .iter()
        .map(|p| vec![p.m.to_string(), p.n.to_string()])
        .collect();
    let result = FactorialResult {
        poly: poly.to_string(),
        scaled_to,
        classification,
        primes,
        certificates,
        certificate_law_holds,
        growth,
        growth_note,
    };
    finish(g, cli, "factorial", start, &result, (vec!["m", "n"], rows))
}

#[derive(Serialize)]
struct Term {
    exponent: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BranchOut {
    exponent: String,
    leading: Term,
    multiplicity: usize,
    deeper_terms: Vec<Term>,
    expansion: String,
    residuals: Vec<f64>,
    residuals_decay: bool,
}

#[derive(Serialize)]
struct FaceOut {
    slope: String,
    monomials: Vec<(u32, u32, String)>,
}

#[derive(Serialize)]
struct PuiseuxResult {
    poly: String,
    exponents: Vec<String>,
    zero_branch_multiplicity: usize,
    total_multiplicity: usize,
    faces: Vec<FaceOut>,
    x_values: Vec<f64>,
    branches: Vec<BranchOut>,
    note: &'static str,
}

pub fn puiseux(g: &Global, a: &PuiseuxArgs, cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    if a.x_values.is_empty() || a.x_values.iter().any(|&x| !(x > 0.0)) || a.x_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(UsageError("--x-values must be positive and increasing".into()).into());
    }
    let f = parse_poly(&a.poly)?;
    let set = branches_at_infinity(&f)?;
    let term = |r: &num_rational::Rational64, c: &Complex64| Term {
        exponent: fmt_ratio(r),
        re: c.re,
        im: c.im,
    };
    let mut branches = Vec::new();
    let mut rows = Vec::new();
    for (k, b) in set.branches.iter().enumerate() {
        let (series, expansion) = match expand_branch(&f, b, a.depth) {
            Ok(s) => (s, "expanded".to_string()),
            Err(Error::MultipleRootUnsupported { multiplicity }) => (
                b.clone(),
                format!("leading term only: face root of multiplicity {multiplicity}"),
            ),
            Err(e) => return Err(e.into()),
        };
        let residuals = branch_residual(&f, &series, &a.x_values);
        for (x, r) in a.x_values.iter().zip(&residuals) {
            rows.push(vec![k.to_string(), fmt_f64(*x), fmt_f64(*r)]);
        }
        branches.push(BranchOut {
            exponent: fmt_ratio(&b.exponent),
            leading: term(&b.exponent, &b.leading_coeff),
            multiplicity: b.multiplicity,
            deeper_terms: series.deeper_terms.iter().map(|(r, c)| term(r, c)).collect(),
            expansion,
            residuals_decay: residuals_decay(&residuals),
            residuals,
        });
    }
    let mut exponents: Vec<_> = set.faces.iter().map(|fc| fc.slope).collect();
    exponents.sort();
    exponents.dedup();
    let result = PuiseuxResult {
        poly: f.to_string(),
        exponents: exponents.iter().map(fmt_ratio).collect(),
        zero_branch_multiplicity: set.zero_branch_multiplicity,
        total_multiplicity: set.total_multiplicity(),
        faces: set
            .faces
            .iter()
            .map(|fc| FaceOut {
                slope: fmt_ratio(&fc.slope),
                monomials: fc.points.iter().map(|((i, j), c)| (*i, *j, c.to_string())).collect(),
            })
            .collect(),
        x_values: a.x_values.clone(),
        branches,
        note: "residual decay stands in for the non-effective radius beyond which each series converges",
    };
    finish(
        g,
        cli,
        "puiseux",
        start,
        &result,
        (vec!["branch", "x", "residual"], rows),
    )
}
