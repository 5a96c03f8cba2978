//! Seeds and predictor-corrector tracing of the real zero set of a plane curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{FloatPoly2, RationalPoly2};

/// Accepted points satisfy `|P| / max(1, |grad P|) <= TRACE_TOL`.
pub const TRACE_TOL: f64 = 1e-10;
/// Gradient norm below which a point counts as singular.
pub const SINGULAR_GRAD: f64 = 1e-8;
const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self { xmin, xmax, ymin, ymax }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Why a trace ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    StepsExhausted,
    Singular,
    LeftBounds,
    ClosedLoop,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSampleSet {
    pub points: Vec<(f64, f64)>,
    /// `|P(x, y)|` at each point.
    pub residuals: Vec<f64>,
    pub step: f64,
    pub seed: (f64, f64),
    pub direction: Direction,
    /// Set when tracing stopped at (or next to) a singular point.
    pub truncated: bool,
    pub stop: StopReason,
}

impl CurveSampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of chord lengths.
    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    pub direction: Direction,
    pub bounds: Option<Rect>,
    pub stop_on_close: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            direction: Direction::Forward,
            bounds: None,
            stop_on_close: true,
        }
    }
}

/// Value, gradient and Hessian of one curve, evaluated in double precision.
struct Field {
    p: FloatPoly2,
    pxx: FloatPoly2,
    pxy: FloatPoly2,
    pyy: FloatPoly2,
}

impl Field {
    fn new(poly: &RationalPoly2) -> Self {
        let (px, py) = poly.partials();
        Self {
            p: poly.to_float(),
            pxx: px.partial_x().to_float(),
            pxy: px.partial_y().to_float(),
            pyy: py.partial_y().to_float(),
        }
    }

    fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        self.p.eval_grad(x, y)
    }

    /// Normalized residual `|P| / max(1, |grad P|)`.
    fn normalized(&self, x: f64, y: f64) -> f64 {
        let (v, gx, gy) = self.eval(x, y);
        v.abs() / gx.hypot(gy).max(1.0)
    }

    /// Rough distance to the nearest critical point of `P`: `|grad| / |Hess|`.
    fn singular_distance(&self, x: f64, y: f64) -> f64 {
        let (_, gx, gy) = self.eval(x, y);
        let (a, b, c) = (self.pxx.eval(x, y), self.pxy.eval(x, y), self.pyy.eval(x, y));
        let h = (a * a + 2.0 * b * b + c * c).sqrt();
        if h == 0.0 {
            f64::INFINITY
        } else {
            gx.hypot(gy) / h
        }
    }

    /// Newton projection along the gradient.
    fn project(&self, mut x: f64, mut y: f64) -> Option<(f64, f64)> {
        for _ in 0..MAX_NEWTON {
            let (v, gx, gy) = self.eval(x, y);
            let g2 = gx * gx + gy * gy;
            if g2 == 0.0 || !g2.is_finite() {
                return None;
            }
            let (dx, dy) = (v * gx / g2, v * gy / g2);
            x -= dx;
            y -= dy;
            let small = dx.hypot(dy) <= 1e-12 * x.hypot(y).max(1.0);
            if small && self.normalized(x, y) <= TRACE_TOL {
                return Some((x, y));
            }
        }
        (self.normalized(x, y) <= TRACE_TOL).then_some((x, y))
    }

    /// Newton on `P = 0` restricted to the line through `(px, py)` normal to `t`.
    fn correct(&self, px: f64, py: f64, t: (f64, f64)) -> Option<(f64, f64)> {
        let (mut x, mut y) = (px, py);
        for _ in 0..MAX_NEWTON {
            let (v, gx, gy) = self.eval(x, y);
            // [gx gy; tx ty] d = [-v; -(t.(q - pred))]
            let c = t.0 * (x - px) + t.1 * (y - py);
            let det = gx * t.1 - gy * t.0;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let dx = (-v * t.1 + c * gy) / det;
            let dy = (-gx * c + v * t.0) / det;
            x += dx;
            y += dy;
            if !x.is_finite() || !y.is_finite() {
                return None;
            }
            let small = dx.hypot(dy) <= 1e-12 * x.hypot(y).max(1.0);
            if small && self.normalized(x, y) <= TRACE_TOL {
                return Some((x, y));
            }
        }
        None
    }
}

fn unit_tangent(gx: f64, gy: f64) -> (f64, f64) {
    let n = gx.hypot(gy);
    (-gy / n, gx / n)
}

/// Points on the real locus inside `rect`, found from sign changes of `P`
/// along the edges of a `grid_n x grid_n` lattice and refined by bisection
/// and Newton projection. Duplicates within `1e-6` are merged.
pub fn find_seed_points(poly: &RationalPoly2, rect: Rect, grid_n: usize) -> Result<Vec<(f64, f64)>> {
    if grid_n < 2 {
        return Err(Error::domain("grid_n must be at least 2"));
    }
    let f = Field::new(poly);
    let n = grid_n;
    let xs: Vec<f64> = (0..n)
        .map(|k| rect.xmin + (rect.xmax - rect.xmin) * k as f64 / (n - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|k| rect.ymin + (rect.ymax - rect.ymin) * k as f64 / (n - 1) as f64)
        .collect();
    let vals: Vec<Vec<f64>> = ys
        .iter()
        .map(|&y| xs.iter().map(|&x| f.p.eval(x, y)).collect())
        .collect();

    let mut raw: Vec<(f64, f64)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = vals[j][i];
            if v == 0.0 {
                raw.push((xs[i], ys[j]));
                continue;
            }
            if i + 1 < n && v * vals[j][i + 1] < 0.0 {
                raw.push(bisect(&f.p, (xs[i], ys[j]), (xs[i + 1], ys[j]), v));
            }
            if j + 1 < n && v * vals[j + 1][i] < 0.0 {
                raw.push(bisect(&f.p, (xs[i], ys[j]), (xs[i], ys[j + 1]), v));
            }
        }
    }
    if raw.is_empty() {
        return Err(Error::NoRealPoints);
    }

    let mut out: Vec<(f64, f64)> = Vec::new();
    for (x, y) in raw {
        let Some((x, y)) = f.project(x, y) else {
            continue;
        };
        if out.iter().all(|&(a, b)| (a - x).hypot(b - y) > 1e-6) {
            out.push((x, y));
        }
    }
    if out.is_empty() {
        return Err(Error::NoRealPoints);
    }
    Ok(out)
}

fn bisect(p: &FloatPoly2, mut a: (f64, f64), mut b: (f64, f64), fa: f64) -> (f64, f64) {
    for _ in 0..80 {
        let m = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
        if m == a || m == b {
            break;
        }
        let fm = p.eval(m.0, m.1);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
}

/// Traces `steps` steps of length `h` from `seed` in the forward direction.
pub fn trace_real_locus(poly: &RationalPoly2, seed: (f64, f64), steps: usize, h: f64) -> Result<CurveSampleSet> {
    trace_real_locus_with(poly, seed, steps, h, TraceOptions::default())
}

pub fn trace_real_locus_with(
    poly: &RationalPoly2,
    seed: (f64, f64),
    steps: usize,
    h: f64,
    opts: TraceOptions,
) -> Result<CurveSampleSet> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("step must be positive"));
    }
    let f = Field::new(poly);
    let singular = |reason: &str| Error::SingularSeed {
        x: seed.0,
        y: seed.1,
        reason: reason.to_string(),
    };
    let (v0, gx0, gy0) = f.eval(seed.0, seed.1);
    if !(v0.abs() <= 1e-8) {
        return Err(singular("residual above 1e-8"));
    }
    if !(gx0.hypot(gy0) > SINGULAR_GRAD) {
        return Err(singular("gradient vanishes"));
    }
    let start = f.project(seed.0, seed.1).ok_or_else(|| singular("projection failed"))?;

    let mut out = CurveSampleSet {
        points: vec![start],
        residuals: vec![f.p.eval(start.0, start.1).abs()],
        step: h,
        seed,
        direction: opts.direction,
        truncated: false,
        stop: StopReason::StepsExhausted,
    };

    let (_, gx, gy) = f.eval(start.0, start.1);
    let mut tangent = unit_tangent(gx, gy);
    if opts.direction == Direction::Backward {
        tangent = (-tangent.0, -tangent.1);
    }
    let mut cur = start;
    let mut travelled = 0.0;

    for _ in 0..steps {
        let mut accepted = None;
        let mut hs = h;
        for _ in 0..=MAX_HALVINGS {
            if let Some(q) = try_step(&f, cur, tangent, hs) {
                accepted = Some(q);
                break;
            }
            hs *= 0.5;
        }
        let Some((q, t_new)) = accepted else {
            if f.singular_distance(cur.0, cur.1) <= h {
                out.truncated = true;
                out.stop = StopReason::Singular;
                return Ok(out);
            }
            return Err(Error::StepFailure { x: cur.0, y: cur.1 });
        };
        if let Some(b) = opts.bounds {
            if !b.contains(q.0, q.1) {
                out.stop = StopReason::LeftBounds;
                return Ok(out);
            }
        }
        travelled += (q.0 - cur.0).hypot(q.1 - cur.1);
        out.points.push(q);
        out.residuals.push(f.p.eval(q.0, q.1).abs());
        cur = q;
        tangent = t_new;

        let (_, gx, gy) = f.eval(q.0, q.1);
        if gx.hypot(gy) < SINGULAR_GRAD {
            out.truncated = true;
            out.stop = StopReason::Singular;
            return Ok(out);
        }
        if opts.stop_on_close && travelled > 4.0 * h && (q.0 - start.0).hypot(q.1 - start.1) < 1.5 * h {
            out.stop = StopReason::ClosedLoop;
            return Ok(out);
        }
    }
    Ok(out)
}

/// One predictor-corrector step; returns the new point and its oriented tangent.
fn try_step(f: &Field, p: (f64, f64), t: (f64, f64), h: f64) -> Option<((f64, f64), (f64, f64))> {
    let pred = (p.0 + h * t.0, p.1 + h * t.1);
    let q = f.correct(pred.0, pred.1, t)?;
    let chord = (q.0 - p.0, q.1 - p.1);
    let len = chord.0.hypot(chord.1);
    if len > 2.0 * h || len == 0.0 {
        return None;
    }
    let (_, gx, gy) = f.eval(q.0, q.1);
    let g = gx.hypot(gy);
    if g == 0.0 {
        return None;
    }
    let mut tn = unit_tangent(gx, gy);
    if tn.0 * t.0 + tn.1 * t.1 < 0.0 {
        tn = (-tn.0, -tn.1);
    }
    // the chord must agree with both end tangents
    if chord.0 * t.0 + chord.1 * t.1 <= 0.0 || chord.0 * tn.0 + chord.1 * tn.1 <= 0.0 {
        return None;
    }
    Some((q, tn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn seeds_on_x_axis() {
        let p = parse_poly("Y").unwrap();
        let seeds = find_seed_points(&p, Rect::new(-1.0, 1.0, -1.0, 1.0), 10).unwrap();
        assert!(!seeds.is_empty());
        assert!(seeds.iter().all(|s| s.1.abs() <= 1e-10));
    }

    #[test]
    fn empty_locus() {
        let p = parse_poly("X^2 + Y^2 + 1").unwrap();
        assert_eq!(
            find_seed_points(&p, Rect::new(-2.0, 2.0, -2.0, 2.0), 20).unwrap_err(),
            Error::NoRealPoints
        );
    }

    #[test]
    fn seeds_on_circle() {
        let p = parse_poly("X^2 + Y^2 - 1").unwrap();
        let seeds = find_seed_points(&p, Rect::new(-2.0, 2.0, -2.0, 2.0), 12).unwrap();
        assert!(seeds.len() >= 4);
        for (x, y) in seeds {
            assert!((x * x + y * y - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn trace_line() {
        let p = parse_poly("Y").unwrap();
        let s = trace_real_locus(&p, (0.0, 0.0), 100, 0.1).unwrap();
        assert_eq!(s.len(), 101);
        assert!(s.points.iter().all(|q| q.1.abs() <= 1e-9));
        let span = s.points.last().unwrap().0 - s.points[0].0;
        assert!((span.abs() - 10.0).abs() < 1e-9, "{span}");
    }

    #[test]
    fn trace_circle_closes() {
        let p = parse_poly("X^2 + Y^2 - 1").unwrap();
        let h = 0.05;
        let s = trace_real_locus(&p, (1.0, 0.0), 1000, h).unwrap();
        assert_eq!(s.stop, StopReason::ClosedLoop);
        for &(x, y) in &s.points {
            assert!((x.hypot(y) - 1.0).abs() <= 1e-9);
        }
        let (x, y) = *s.points.last().unwrap();
        assert!((x - 1.0).hypot(y) <= 2.0 * h);
        assert!(s
            .points
            .windows(2)
            .all(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) <= 2.0 * h));
    }

    #[test]
    fn cusp_truncates() {
        let p = parse_poly("Y^2 - X^3").unwrap();
        // upper branch; the forward tangent here points at the origin
        let s = trace_real_locus(&p, (0.04, 0.008), 500, 0.01).unwrap();
        assert!(s.truncated);
        assert_eq!(s.stop, StopReason::Singular);
        let (x, y) = *s.points.last().unwrap();
        assert!(x.hypot(y) < 0.02, "{x} {y}");
    }

    #[test]
    fn singular_seed_rejected() {
        let p = parse_poly("Y^2 - X^3").unwrap();
        assert!(matches!(
            trace_real_locus(&p, (0.0, 0.0), 10, 0.1),
            Err(Error::SingularSeed { .. })
        ));
        assert!(matches!(
            trace_real_locus(&p, (1.0, 0.0), 10, 0.1),
            Err(Error::SingularSeed { .. })
        ));
    }

    #[test]
    fn bounds_stop_tracing() {
        let p = parse_poly("Y - X").unwrap();
        let s = trace_real_locus_with(
            &p,
            (0.0, 0.0),
            1000,
            0.1,
            TraceOptions {
                bounds: Some(Rect::new(-1.0, 1.0, -1.0, 1.0)),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.stop, StopReason::LeftBounds);
        assert!(s.points.iter().all(|q| q.0.abs() <= 1.0));
    }
}
