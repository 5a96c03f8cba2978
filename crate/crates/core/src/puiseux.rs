//! Branches at infinity `Y ~ c X^r` of a plane curve from its Newton
//! polygon, with optional deeper terms for simple roots.
//!
//! Exponents are exact rationals; coefficients are double-precision complex.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::RationalPoly2;
use crate::upoly::{complex_roots, UPoly};

/// Coefficients whose magnitude falls below this fraction of the absolute
/// sum that produced them are treated as cancelled.
const CANCEL_TOL: f64 = 1e-10;
/// Normalized residuals at or below this are rounding noise.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Branch exponent `r` balancing the face.
    pub slope: Rational64,
    /// Monomials `((i, j), c_ij)` on the face, ordered by `j`.
    pub points: Vec<((u32, u32), BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    pub exponent: Rational64,
    pub leading_coeff: Complex64,
    /// `(exponent, coeff)` with strictly decreasing exponents, all below
    /// `exponent`.
    pub deeper_terms: Vec<(Rational64, Complex64)>,
    pub multiplicity: usize,
}

impl PuiseuxBranch {
    /// Value of the truncated series at `x > 0`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let term = |r: &Rational64, c: &Complex64| c * x.powf(ratio_f64(r));
        self.deeper_terms
            .iter()
            .fold(term(&self.exponent, &self.leading_coeff), |acc, (r, c)| {
                acc + term(r, c)
            })
    }
}

pub fn ratio_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"p/q"` in lowest terms.
pub fn fmt_ratio(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Upper hull of the support, drawn as points `(j, i)`, from least to
/// greatest `Y`-exponent. Each edge gives one exponent `r`.
pub fn newton_polygon_at_infinity(f: &RationalPoly2) -> Result<Vec<Face>> {
    if f.degree_y() == 0 {
        return Err(Error::Degenerate(format!("'{f}' has no Y dependence")));
    }
    // top X-exponent for each Y-exponent
    let mut top: BTreeMap<u32, (u32, BigRational)> = BTreeMap::new();
    for (&(i, j), c) in f.terms() {
        match top.get(&j) {
            Some((ti, _)) if *ti >= i => {}
            _ => {
                top.insert(j, (i, c.clone()));
            }
        }
    }
    let pts: Vec<(i64, i64, BigRational)> = top.into_iter().map(|(j, (i, c))| (j as i64, i as i64, c)).collect();

    // monotone chain, keeping collinear points
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]]);
            let c = &pts[k];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross > 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut start = 0;
    while start + 1 < hull.len() {
        let a = &pts[hull[start]];
        let b = &pts[hull[start + 1]];
        let slope = Rational64::new(a.1 - b.1, b.0 - a.0);
        let mut end = start + 1;
        while end + 1 < hull.len() {
            let c = &pts[hull[end + 1]];
            if Rational64::new(a.1 - c.1, c.0 - a.0) == slope {
                end += 1;
            } else {
                break;
            }
        }
        let points = hull[start..=end]
            .iter()
            .map(|&k| ((pts[k].1 as u32, pts[k].0 as u32), pts[k].2.clone()))
            .collect();
        faces.push(Face { slope, points });
        start = end;
    }
    Ok(faces)
}

/// Square-free decomposition `p = c * prod g_k^k` (Yun), returned as
/// `(g_k, k)` for nonconstant `g_k`.
fn squarefree_decomposition(p: &UPoly) -> Vec<(UPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut k = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), k));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        k += 1;
    }
    out
}

/// Nonzero roots of the face polynomial `sum c_ij c^(j - j_0)` with their
/// multiplicities.
pub fn leading_coefficients(face: &Face) -> Result<Vec<(Complex64, usize)>> {
    let j0 = face.points.first().map(|p| p.0 .1).unwrap_or(0);
    let deg = face.points.last().map(|p| p.0 .1).unwrap_or(0) - j0;
    let mut coeffs = vec![BigRational::zero(); deg as usize + 1];
    for ((_, j), c) in &face.points {
        coeffs[(j - j0) as usize] = c.clone();
    }
    let phi = UPoly::new(coeffs);
    let phi_f = phi.to_f64();
    let mut out = Vec::new();
    for (g, k) in squarefree_decomposition(&phi) {
        for z in complex_roots(&g.to_f64()) {
            let scale: f64 = phi_f
                .iter()
                .enumerate()
                .map(|(e, a)| a.abs() * z.norm().powi(e as i32))
                .sum();
            let val = phi_f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
            if val.norm() > 1e-8 * scale {
                return Err(Error::NumericalFailure(format!(
                    "face root {z} leaves residual {}",
                    val.norm()
                )));
            }
            out.push((z, k));
        }
    }
    out.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BranchSet {
    pub faces: Vec<Face>,
    pub branches: Vec<PuiseuxBranch>,
    /// Power of `Y` dividing `F`; these branches are `Y = 0`.
    pub zero_branch_multiplicity: usize,
}

impl BranchSet {
    pub fn total_multiplicity(&self) -> usize {
        self.zero_branch_multiplicity + self.branches.iter().map(|b| b.multiplicity).sum::<usize>()
    }
}

/// Leading terms of every branch at infinity.
pub fn branches_at_infinity(f: &RationalPoly2) -> Result<BranchSet> {
    let faces = newton_polygon_at_infinity(f)?;
    let zero = f.terms().map(|(e, _)| e.1).min().unwrap_or(0) as usize;
    let mut branches = Vec::new();
    for face in &faces {
        for (c, k) in leading_coefficients(face)? {
            branches.push(PuiseuxBranch {
                exponent: face.slope,
                leading_coeff: c,
                deeper_terms: Vec::new(),
                multiplicity: k,
            });
        }
    }
    Ok(BranchSet {
        faces,
        branches,
        zero_branch_multiplicity: zero,
    })
}

/// The distinct branch exponents, ascending.
pub fn asymptotic_exponents(f: &RationalPoly2) -> Result<Vec<Rational64>> {
    if f.is_constant() {
        return Err(Error::Degenerate(format!("'{f}' is constant")));
    }
    let mut v: Vec<Rational64> = newton_polygon_at_infinity(f)?.into_iter().map(|f| f.slope).collect();
    v.sort();
    v.dedup();
    Ok(v)
}

/// Polynomial in `Z` whose coefficients are generalized monomials
/// `X^q` with rational `q`. Each coefficient carries the absolute sum of
/// the contributions that formed it, for cancellation detection.
type SeriesPoly = BTreeMap<(Rational64, u32), (Complex64, f64)>;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// `G(X, a X^rho + Z)`.
fn shift(g: &SeriesPoly, a: Complex64, rho: Rational64) -> SeriesPoly {
    let mut out: SeriesPoly = BTreeMap::new();
    for (&(q, j), &(c, _)) in g {
        for k in 0..=j {
            let coef = c * a.powu(j - k) * binomial(j, k);
            let exp = q + rho * Rational64::from_integer((j - k) as i64);
            let slot = out.entry((exp, k)).or_insert((Complex64::new(0.0, 0.0), 0.0));
            slot.0 += coef;
            slot.1 += coef.norm();
        }
    }
    out.retain(|_, (c, s)| c.norm() > CANCEL_TOL * *s);
    out
}

/// Appends up to `depth` further terms to a simple branch.
pub fn expand_branch(f: &RationalPoly2, branch: &PuiseuxBranch, depth: usize) -> Result<PuiseuxBranch> {
    if depth == 0 {
        return Ok(branch.clone());
    }
    if branch.multiplicity != 1 {
        return Err(Error::MultipleRootUnsupported {
            multiplicity: branch.multiplicity,
        });
    }
    let mut g: SeriesPoly = f
        .terms()
        .map(|(&(i, j), c)| {
            let v = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            ((Rational64::from_integer(i as i64), j), (v, v.norm()))
        })
        .collect();
    let mut out = branch.clone();
    let mut terms: Vec<(Rational64, Complex64)> = vec![(branch.exponent, branch.leading_coeff)];
    terms.extend(branch.deeper_terms.iter().copied());
    for &(rho, a) in &terms {
        g = shift(&g, a, rho);
    }
    let mut last = terms.last().unwrap().0;
    for _ in 0..depth {
        let lead = |k: u32| g.iter().filter(|((_, j), _)| *j == k).max_by_key(|((q, _), _)| *q);
        let Some((&(e0, _), &(c0, _))) = lead(0) else {
            break; // the truncated series already solves F exactly
        };
        let Some((&(e1, _), &(c1, _))) = lead(1) else {
            return Err(Error::NumericalFailure(
                "no linear term in the shifted polynomial".into(),
            ));
        };
        let rho = e0 - e1;
        if rho >= last {
            return Err(Error::NumericalFailure(format!(
                "next exponent {} does not decrease below {}",
                fmt_ratio(&rho),
                fmt_ratio(&last)
            )));
        }
        let a = -c0 / c1;
        out.deeper_terms.push((rho, a));
        g = shift(&g, a, rho);
        last = rho;
    }
    Ok(out)
}

/// `|F(X, Y(X))|` divided by the largest monomial magnitude at that point.
pub fn branch_residual(f: &RationalPoly2, branch: &PuiseuxBranch, xs: &[f64]) -> Vec<f64> {
    let terms: Vec<(u32, u32, f64)> = f
        .terms()
        .map(|(&(i, j), c)| (i, j, c.to_f64().unwrap_or(f64::NAN)))
        .collect();
    xs.iter()
        .map(|&x| {
            let y = branch.eval(x);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut big = 0.0f64;
            for &(i, j, c) in &terms {
                let m = y.powu(j) * (c * x.powi(i as i32));
                sum += m;
                big = big.max(m.norm());
            }
            if big == 0.0 {
                0.0
            } else {
                sum.norm() / big
            }
        })
        .collect()
}

/// Strictly decreasing, except that consecutive values both at rounding
/// level count as settled.
pub fn residuals_decay(res: &[f64]) -> bool {
    res.windows(2)
        .all(|w| w[1] < w[0] || (w[0] <= RESIDUAL_FLOOR && w[1] <= RESIDUAL_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn p(s: &str) -> RationalPoly2 {
        parse_poly(s).unwrap()
    }

    #[test]
    fn polygon_slopes() {
        let f = newton_polygon_at_infinity(&p("Y^2 - X^3")).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].slope, r(3, 2));
        assert_eq!(newton_polygon_at_infinity(&p("X*Y - 1")).unwrap()[0].slope, r(-1, 1));
        assert_eq!(newton_polygon_at_infinity(&p("Y - X")).unwrap()[0].slope, r(1, 1));
        assert!(matches!(
            newton_polygon_at_infinity(&p("X^2 + 1")),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn exponents() {
        assert_eq!(asymptotic_exponents(&p("X - Y")).unwrap(), vec![r(1, 1)]);
        assert_eq!(asymptotic_exponents(&p("Y^2 - X^3")).unwrap(), vec![r(3, 2)]);
        let prod = &p("Y - X") * &p("X*Y - 1");
        assert_eq!(asymptotic_exponents(&prod).unwrap(), vec![r(-1, 1), r(1, 1)]);
    }

    #[test]
    fn face_roots() {
        let roots = |s: &str| {
            let f = newton_polygon_at_infinity(&p(s)).unwrap();
            leading_coefficients(&f[0]).unwrap()
        };
        let c = roots("Y^2 - X^3");
        assert_eq!(c.len(), 2);
        assert!((c[0].0 - 1.0).norm() < 1e-10 && (c[1].0 + 1.0).norm() < 1e-10);
        let c = roots("X*Y - 1");
        assert_eq!(c.len(), 1);
        assert!((c[0].0 - 1.0).norm() < 1e-10);
        let c = roots("Y^2 - X^2 - 1");
        assert!((c[0].0 - 1.0).norm() < 1e-10 && (c[1].0 + 1.0).norm() < 1e-10);
        // (Y - X)^3 Y: one triple root
        let c = roots("Y^4 - 3*X*Y^3 + 3*X^2*Y^2 - X^3*Y");
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].1, 3);
    }

    #[test]
    fn deeper_terms() {
        let f = p("Y^2 - X^3 - X");
        let set = branches_at_infinity(&f).unwrap();
        let b = set.branches.iter().find(|b| b.leading_coeff.re > 0.0).unwrap();
        let e = expand_branch(&f, b, 1).unwrap();
        assert_eq!(e.deeper_terms.len(), 1);
        assert_eq!(e.deeper_terms[0].0, r(-1, 2));
        assert!((e.deeper_terms[0].1 - 0.5).norm() < 1e-12);

        let f = p("X*Y - 1");
        let b = &branches_at_infinity(&f).unwrap().branches[0];
        assert!(expand_branch(&f, b, 2).unwrap().deeper_terms.is_empty());
        assert_eq!(expand_branch(&f, b, 0).unwrap(), *b);
    }

    #[test]
    fn graph_reproduced() {
        let f = p("Y - 3*X^3 + 2*X - 7");
        let b = &branches_at_infinity(&f).unwrap().branches[0];
        assert_eq!(b.exponent, r(3, 1));
        assert!((b.leading_coeff - 3.0).norm() < 1e-12);
        let e = expand_branch(&f, b, 3).unwrap();
        let got: Vec<(Rational64, f64)> = e.deeper_terms.iter().map(|(q, c)| (*q, c.re)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, r(1, 1));
        assert!((got[0].1 + 2.0).abs() < 1e-12);
        assert_eq!(got[1].0, r(0, 1));
        assert!((got[1].1 - 7.0).abs() < 1e-12);
    }

    #[test]
    fn residuals() {
        let xs = [1e2, 1e4, 1e6];
        let f = p("Y^2 - X^3");
        let b = &branches_at_infinity(&f).unwrap().branches[0];
        assert!(branch_residual(&f, b, &xs).iter().all(|v| *v <= 1e-10));

        let f = p("Y^2 - X^3 - X");
        let b = &branches_at_infinity(&f).unwrap().branches[0];
        let res = branch_residual(&f, b, &xs);
        assert!(res[0] > res[1] && res[1] > res[2], "{res:?}");

        let wrong = PuiseuxBranch {
            exponent: r(2, 1),
            leading_coeff: Complex64::new(1.0, 0.0),
            deeper_terms: vec![],
            multiplicity: 1,
        };
        assert!(branch_residual(&p("Y^2 - X^3"), &wrong, &xs).iter().all(|v| *v > 0.5));
    }

    #[test]
    fn multiplicities_sum_to_y_degree() {
        for s in [
            "Y^2 - X^3",
            "X*Y - 1",
            "Y^3 - X*Y + X^5",
            "(Y - X)*(X*Y - 1)",
            "Y^2 + X^2 - 4",
            "X*Y^2 + Y",
        ] {
            let f = p(s);
            let set = branches_at_infinity(&f).unwrap();
            assert_eq!(set.total_multiplicity(), f.degree_y() as usize, "{s}");
        }
    }

    #[test]
    fn decay_rule() {
        assert!(residuals_decay(&[1e-3, 1e-7, 1e-11]));
        assert!(residuals_decay(&[1e-3, 1e-15, 2e-15]));
        assert!(!residuals_decay(&[1e-3, 1e-3]));
    }
}
