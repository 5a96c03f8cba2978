//! Exact bivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent pair `(i, j)` of the monomial `X^i Y^j`.
pub type Exponents = (u32, u32);

/// A polynomial in `Q[X, Y]` kept in canonical form: no zero coefficients,
/// reduced fractions, one entry per exponent pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly2 {
    terms: BTreeMap<Exponents, BigRational>,
}

impl RationalPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, BigRational::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, BigRational::one())
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigRational)>,
    {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            let slot = out.entry(e).or_insert_with(BigRational::zero);
            *slot += c;
        }
        out.retain(|_, c| !c.is_zero());
        Self { terms: out }
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(terms: &[((u32, u32), i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, BigRational::from_integer(c.into()))))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|e| e.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|e| e.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.0 + e.1).max().unwrap_or(0)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    /// Multiply by the lcm of the denominators and divide by the gcd of the
    /// numerators, giving a primitive integer polynomial with positive
    /// leading coefficient (largest exponent pair in `(i, j)` order).
    pub fn primitive_integer(&self) -> Self {
        use num_integer::Integer;
        if self.is_zero() {
            return Self::zero();
        }
        let lcm = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        let mut scale = BigRational::new(lcm, g);
        if self
            .terms
            .values()
            .next_back()
            .map(|c| c.is_negative())
            .unwrap_or(false)
        {
            scale = -scale;
        }
        self.scale(&scale)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * BigRational::from_integer(i.into()))),
        )
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * BigRational::from_integer(j.into()))),
        )
    }

    /// Formal partial derivatives `(dP/dX, dP/dY)`.
    pub fn partials(&self) -> (Self, Self) {
        (self.partial_x(), self.partial_y())
    }

    /// Dense rows `rows[j][i] = c_{i,j}`.
    fn dense_rows<T: Clone>(&self, zero: T, conv: impl Fn(&BigRational) -> T) -> Vec<Vec<T>> {
        let (dx, dy) = (self.degree_x() as usize, self.degree_y() as usize);
        let mut rows = vec![vec![zero; dx + 1]; dy + 1];
        for (&(i, j), c) in &self.terms {
            rows[j as usize][i as usize] = conv(c);
        }
        rows
    }

    /// Exact evaluation by nested Horner schemes (outer in `Y`, inner in `X`).
    pub fn evaluate_exact(&self, x: &BigRational, y: &BigRational) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let rows = self.dense_rows(BigRational::zero(), Clone::clone);
        let mut acc = BigRational::zero();
        for row in rows.iter().rev() {
            let mut inner = BigRational::zero();
            for c in row.iter().rev() {
                inner = inner * x + c;
            }
            acc = acc * y + inner;
        }
        acc
    }

    /// Evaluation at integer points as a sum of big-integer monomials.
    /// Returns `None` when some coefficient is not an integer.
    pub fn evaluate_integer(&self, x: &BigInt, y: &BigInt) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (&(i, j), c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            acc += c.numer() * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize);
        }
        Some(acc)
    }

    pub fn to_float(&self) -> FloatPoly2 {
        FloatPoly2 {
            rows: self.dense_rows(0.0, |c| c.to_f64().unwrap_or(f64::NAN)),
        }
    }

    pub fn evaluate_float(&self, x: f64, y: f64) -> f64 {
        self.to_float().eval(x, y)
    }

    /// Univariate coefficients in `Y`: `out[j]` is the coefficient of `Y^j`
    /// as a polynomial in `X` (ascending powers).
    pub fn coefficients_in_y(&self) -> Vec<Vec<BigRational>> {
        self.dense_rows(BigRational::zero(), Clone::clone)
    }

    /// Swap the roles of `X` and `Y`.
    pub fn swap_xy(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// Exact division; `None` unless `divisor` divides `self` in `Q[X, Y]`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        // lex order on (j, i): the leading term has the largest Y power
        let lead = |p: &Self| -> Option<(Exponents, BigRational)> {
            p.terms
                .iter()
                .max_by_key(|(&(i, j), _)| (j, i))
                .map(|(e, c)| (*e, c.clone()))
        };
        let ((di, dj), dc) = lead(divisor)?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(((ri, rj), rc)) = lead(&rem) {
            if ri < di || rj < dj {
                return None;
            }
            let t = Self::monomial(ri - di, rj - dj, rc / &dc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }
}

impl Add for &RationalPoly2 {
    type Output = RationalPoly2;
    fn add(self, rhs: Self) -> RationalPoly2 {
        RationalPoly2::from_terms(self.terms.iter().chain(rhs.terms.iter()).map(|(e, c)| (*e, c.clone())))
    }
}

impl Sub for &RationalPoly2 {
    type Output = RationalPoly2;
    fn sub(self, rhs: Self) -> RationalPoly2 {
        RationalPoly2::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.clone()))
                .chain(rhs.terms.iter().map(|(e, c)| (*e, -c))),
        )
    }
}

impl Mul for &RationalPoly2 {
    type Output = RationalPoly2;
    fn mul(self, rhs: Self) -> RationalPoly2 {
        RationalPoly2::from_terms(self.terms.iter().flat_map(|(&(i1, j1), c1)| {
            rhs.terms
                .iter()
                .map(move |(&(i2, j2), c2)| ((i1 + i2, j1 + j2), c1 * c2))
        }))
    }
}

impl Neg for &RationalPoly2 {
    type Output = RationalPoly2;
    fn neg(self) -> RationalPoly2 {
        RationalPoly2 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

/// Double-precision copy of a [`RationalPoly2`] for repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly2 {
    rows: Vec<Vec<f64>>,
}

impl FloatPoly2 {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.rows.iter().rev() {
            acc = acc * y + horner(row, x);
        }
        acc
    }

    /// Value and gradient `(P, dP/dX, dP/dY)`.
    pub fn eval_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut p, mut px, mut py) = (0.0, 0.0, 0.0);
        for row in self.rows.iter().rev() {
            let (r, dr) = horner_with_derivative(row, x);
            py = py * y + p;
            p = p * y + r;
            px = px * y + dr;
        }
        (p, px, py)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &c in coeffs.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

// ---------------------------------------------------------------------------
// Text form
//
//   expr     := term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ('^' uint)?
//   base     := 'X' | 'Y' | rational | '(' expr ')'
//   rational := int ('/' uint)?

const MAX_EXPONENT: u32 = 4096;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            expected: expected.to_string(),
        })
    }

    fn expr(&mut self) -> Result<RationalPoly2> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalPoly2> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RationalPoly2> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let e = self.uint()?;
            let e = e.to_u32().filter(|&e| e <= MAX_EXPONENT).ok_or(Error::Parse {
                position: start,
                expected: format!("exponent at most {MAX_EXPONENT}"),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RationalPoly2> {
        match self.peek() {
            Some(b'X') => {
                self.pos += 1;
                Ok(RationalPoly2::x())
            }
            Some(b'Y') => {
                self.pos += 1;
                Ok(RationalPoly2::y())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') | Some(b'0'..=b'9') => Ok(RationalPoly2::constant(self.rational()?)),
            _ => self.err("'X', 'Y', a rational number or '('"),
        }
    }

    fn rational(&mut self) -> Result<BigRational> {
        self.skip_ws();
        let negative = self.src.get(self.pos) == Some(&b'-');
        if negative {
            self.pos += 1;
        }
        let mut num = self.uint()?;
        if negative {
            num = -num;
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let den = self.uint()?;
            if den.is_zero() {
                return Err(Error::Parse {
                    position: at,
                    expected: "nonzero denominator".into(),
                });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("digit");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse as integer"))
    }
}

/// Parses the polynomial grammar above into canonical form.
pub fn parse_poly(text: &str) -> Result<RationalPoly2> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return p.err("end of input, '+', '-' or '*'");
    }
    Ok(poly)
}

/// Like [`parse_poly`] but rejects constants, which define no curve.
pub fn parse_curve(text: &str) -> Result<RationalPoly2> {
    let p = parse_poly(text)?;
    if p.is_constant() {
        return Err(Error::Degenerate(format!("'{text}' is constant")));
    }
    Ok(p)
}

impl FromStr for RationalPoly2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

fn monomial_text(i: u32, j: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => None,
        1 => Some(v.to_string()),
        e => Some(format!("{v}^{e}")),
    };
    [part("X", i), part("Y", j)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for RationalPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(&(i, j), _)| std::cmp::Reverse((i + j, i)));
        for (k, (&(i, j), c)) in terms.into_iter().enumerate() {
            let mono = monomial_text(i, j);
            let magnitude = c.abs();
            if k == 0 {
                match (mono.is_empty(), c.is_one()) {
                    (true, _) => write!(f, "{c}")?,
                    (false, true) => write!(f, "{mono}")?,
                    (false, false) => write!(f, "{c}*{mono}")?,
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
                match (mono.is_empty(), magnitude.is_one()) {
                    (true, _) => write!(f, "{magnitude}")?,
                    (false, true) => write!(f, "{mono}")?,
                    (false, false) => write!(f, "{magnitude}*{mono}")?,
                }
            }
        }
        Ok(())
    }
}
