//! Heuristic irreducibility check over Q.
//!
//! Reducibility is always certified by an exact factor that divides the
//! input. Absence of a factor is only evidence: the search covers monomial
//! factors, contents, repeated factors and linear factors `aX + bY + c`.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::poly::RationalPoly2;
use crate::upoly::UPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    MonomialFactor,
    Content,
    RepeatedFactor,
    LinearFactor,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Irreducibility {
    ProbablyIrreducible,
    /// `witness` is a proper factor of the input, in primitive integer form.
    Reducible {
        witness: RationalPoly2,
        kind: WitnessKind,
    },
    /// Every specialization had rational roots but no factor was isolated.
    Inconclusive,
}

impl Irreducibility {
    pub fn label(&self) -> &'static str {
        match self {
            Irreducibility::ProbablyIrreducible => "ProbablyIrreducible",
            Irreducibility::Reducible { .. } => "Reducible",
            Irreducibility::Inconclusive => "Inconclusive",
        }
    }
}

const DEFAULT_SEED: u64 = 0x6a09_e667_f3bc_c908;

/// Runs the factor search with `trials` random specializations `X = x0`.
pub fn probable_irreducibility(p: &RationalPoly2, trials: usize) -> Irreducibility {
    probable_irreducibility_seeded(p, trials, DEFAULT_SEED)
}

pub fn probable_irreducibility_seeded(p: &RationalPoly2, trials: usize, seed: u64) -> Irreducibility {
    if p.is_constant() {
        return Irreducibility::Inconclusive;
    }
    if p.total_degree() == 1 {
        return Irreducibility::ProbablyIrreducible;
    }
    let reducible = |w: RationalPoly2, kind| Irreducibility::Reducible {
        witness: w.primitive_integer(),
        kind,
    };

    if let Some(w) = monomial_factor(p) {
        return reducible(w, WitnessKind::MonomialFactor);
    }
    if p.degree_y() == 0 {
        return univariate_verdict(&to_upoly_x(p), false);
    }
    if p.degree_x() == 0 {
        return univariate_verdict(&to_upoly_x(&p.swap_xy()), true);
    }

    let rows = in_y(p);
    let cy = content(&rows);
    if cy.degree().unwrap_or(0) > 0 {
        return reducible(from_upoly(&cy, false), WitnessKind::Content);
    }
    let cx = content(&in_y(&p.swap_xy()));
    if cx.degree().unwrap_or(0) > 0 {
        return reducible(from_upoly(&cx, true), WitnessKind::Content);
    }

    // primitive and linear in one variable: irreducible
    if p.degree_y() == 1 || p.degree_x() == 1 {
        return Irreducibility::ProbablyIrreducible;
    }

    let g = gcd_in_y(&rows, &in_y(&p.partial_y()));
    if g.len() > 1 {
        return reducible(from_rows(&g), WitnessKind::RepeatedFactor);
    }

    // Specializations X = x0 with the Y-degree preserved.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lead_y = &rows[rows.len() - 1];
    let mut specs: Vec<(BigRational, Vec<BigRational>)> = Vec::new();
    let mut attempts = 0;
    while specs.len() < trials.max(2) && attempts < 50 * trials.max(2) {
        attempts += 1;
        let x0 = BigRational::from_integer(rng.random_range(-1000i64..=1000).into());
        if lead_y.eval(&x0).is_zero() || specs.iter().any(|(x, _)| *x == x0) {
            continue;
        }
        let u = UPoly::new(rows.iter().map(|c| c.eval(&x0)).collect());
        specs.push((x0, u.rational_roots()));
    }

    if specs.len() >= 2 {
        let (x0, r0) = &specs[0];
        let (x1, r1) = &specs[1];
        let mut lines: Vec<(BigRational, BigRational)> = Vec::new();
        for a in r0 {
            for b in r1 {
                let slope = (b - a) / (x1 - x0);
                let icpt = a - &slope * x0;
                lines.push((slope, icpt));
            }
        }
        lines.sort();
        lines.dedup();
        for (slope, icpt) in lines.into_iter().rev() {
            let cand = RationalPoly2::from_terms([
                ((0, 1), BigRational::from_integer(1.into())),
                ((1, 0), -slope.clone()),
                ((0, 0), -icpt.clone()),
            ]);
            if p.div_exact(&cand).is_some() {
                return reducible(cand, WitnessKind::LinearFactor);
            }
        }
    }

    let consistent = !specs.is_empty() && specs.iter().all(|(_, r)| !r.is_empty());
    if consistent {
        Irreducibility::Inconclusive
    } else {
        Irreducibility::ProbablyIrreducible
    }
}

fn monomial_factor(p: &RationalPoly2) -> Option<RationalPoly2> {
    let min_i = p.terms().map(|(e, _)| e.0).min().unwrap_or(0);
    let min_j = p.terms().map(|(e, _)| e.1).min().unwrap_or(0);
    let one = BigRational::from_integer(1.into());
    let is_bare = |i, j| p.len() == 1 && p.terms().all(|(e, _)| *e == (i, j));
    if min_i > 0 && !is_bare(1, 0) {
        return Some(RationalPoly2::monomial(1, 0, one));
    }
    if min_j > 0 && !is_bare(0, 1) {
        return Some(RationalPoly2::monomial(0, 1, one));
    }
    None
}

fn univariate_verdict(u: &UPoly, swapped: bool) -> Irreducibility {
    let deg = u.degree().unwrap_or(0);
    if deg <= 1 {
        return Irreducibility::ProbablyIrreducible;
    }
    let g = u.gcd(&u.derivative());
    let witness = if g.degree().unwrap_or(0) > 0 {
        Some((g, WitnessKind::RepeatedFactor))
    } else {
        u.rational_roots().first().map(|r| {
            (
                UPoly::new(vec![-r.clone(), BigRational::from_integer(1.into())]),
                WitnessKind::LinearFactor,
            )
        })
    };
    match witness {
        Some((w, kind)) => Irreducibility::Reducible {
            witness: from_upoly(&w, swapped).primitive_integer(),
            kind,
        },
        None => Irreducibility::ProbablyIrreducible,
    }
}

fn to_upoly_x(p: &RationalPoly2) -> UPoly {
    let mut c = vec![BigRational::zero(); p.degree_x() as usize + 1];
    for (&(i, _), v) in p.terms() {
        c[i as usize] = v.clone();
    }
    UPoly::new(c)
}

fn from_upoly(u: &UPoly, in_y_var: bool) -> RationalPoly2 {
    RationalPoly2::from_terms(u.coeffs().iter().enumerate().map(|(k, c)| {
        let k = k as u32;
        (if in_y_var { (0, k) } else { (k, 0) }, c.clone())
    }))
}

/// `rows[j]` is the coefficient of `Y^j`, a polynomial in `X`.
fn in_y(p: &RationalPoly2) -> Vec<UPoly> {
    p.coefficients_in_y().into_iter().map(UPoly::new).collect()
}

fn from_rows(rows: &[UPoly]) -> RationalPoly2 {
    RationalPoly2::from_terms(rows.iter().enumerate().flat_map(|(j, u)| {
        u.coeffs()
            .iter()
            .enumerate()
            .map(move |(i, c)| ((i as u32, j as u32), c.clone()))
    }))
}

fn trim(mut rows: Vec<UPoly>) -> Vec<UPoly> {
    while rows.last().is_some_and(UPoly::is_zero) {
        rows.pop();
    }
    rows
}

fn content(rows: &[UPoly]) -> UPoly {
    rows.iter().filter(|u| !u.is_zero()).fold(
        UPoly::default(),
        |acc, u| if acc.is_zero() { u.monic() } else { acc.gcd(u) },
    )
}

fn primitive_part(rows: &[UPoly]) -> Vec<UPoly> {
    let c = content(rows);
    if c.is_zero() {
        return Vec::new();
    }
    trim(rows.iter().map(|u| u.div_rem(&c).0).collect())
}

/// Pseudo-remainder of `a` by `b` as polynomials in `Y` over `Q[X]`.
fn pseudo_rem(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let n = b.len() - 1;
    let lb = &b[n];
    let mut r = trim(a.to_vec());
    while r.len() > n {
        let m = r.len() - 1;
        let lr = r[m].clone();
        let shift = m - n;
        let mut next: Vec<UPoly> = r.iter().map(|u| u.mul(lb)).collect();
        for (k, bk) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&lr.mul(bk));
        }
        r = trim(next);
    }
    r
}

/// Gcd in `Q[X][Y]` of two polynomials with trivial `X`-content, via the
/// primitive remainder sequence.
fn gcd_in_y(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let (mut a, mut b) = (primitive_part(a), primitive_part(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive_part(&pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    a
}
