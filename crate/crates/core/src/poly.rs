//! Bivariate complex polynomials and rational maps `F = P/Q` in the
//! variables `z`, `w`.
//!
//! Coefficients are `f64` complex numbers. Everything here is a pure function
//! of its inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

pub type C64 = Complex64;

/// Default cap on the degree in each variable.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

/// Relative tolerance used to decide that a polynomial vanishes at a point.
pub const VANISHING_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("degree cap {cap} exceeded")]
    DegreeCap { cap: u32 },
    #[error("numerator and denominator are both constant")]
    ConstantMap,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("point lies on the pole set (Q = 0)")]
    PoleAtPoint,
}

/// A point `(z, w)` of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CPoint {
    pub z: C64,
    pub w: C64,
}

impl CPoint {
    pub fn new(z: C64, w: C64) -> Self {
        Self { z, w }
    }

    pub fn from_real(x: [f64; 4]) -> Self {
        Self { z: C64::new(x[0], x[1]), w: C64::new(x[2], x[3]) }
    }

    pub fn to_real(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dist(self, other: CPoint) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }

    pub fn conj(self) -> Self {
        Self { z: self.z.conj(), w: self.w.conj() }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { z: self.z * s, w: self.w * s }
    }

    pub fn is_finite(self) -> bool {
        self.to_real().iter().all(|v| v.is_finite())
    }
}

/// Value and derivatives up to order two of a polynomial at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct Jet {
    pub v: C64,
    pub dz: C64,
    pub dw: C64,
    pub dzz: C64,
    pub dzw: C64,
    pub dww: C64,
}

/// A polynomial in `z` and `w` with complex coefficients, stored as a map from
/// exponent pairs to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CPoly2 {
    terms: BTreeMap<(u32, u32), C64>,
}

impl CPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn z() -> Self {
        Self::monomial(1, 0, C64::new(1.0, 0.0))
    }

    pub fn w() -> Self {
        Self::monomial(0, 1, C64::new(1.0, 0.0))
    }

    pub fn monomial(a: u32, b: u32, c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// Builds a polynomial from `(a, b, coefficient)` triples, collecting
    /// repeated exponents and dropping zero terms.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, C64)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    fn add_term(&mut self, a: u32, b: u32, c: C64) {
        let entry = self.terms.entry((a, b)).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a == 0 && b == 0)
    }

    pub fn degree_z(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_w(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    /// Largest coefficient modulus (1 for the zero polynomial).
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms().map(|((a, b), v)| (a, b, v * c)))
    }

    pub fn diff_z(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|((a, _), _)| *a > 0)
                .map(|((a, b), c)| (a - 1, b, c * a as f64)),
        )
    }

    pub fn diff_w(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|((_, b), _)| *b > 0)
                .map(|((a, b), c)| (a, b - 1, c * b as f64)),
        )
    }

    pub fn checked_mul(&self, other: &Self, cap: u32) -> Result<Self, PolyError> {
        let too_big = self.degree_z() + other.degree_z() > cap || self.degree_w() + other.degree_w() > cap;
        if too_big && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::DegreeCap { cap });
        }
        let mut out = Self::zero();
        for ((a1, b1), c1) in self.terms() {
            for ((a2, b2), c2) in other.terms() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, e: u32, cap: u32) -> Result<Self, PolyError> {
        if !self.is_constant() && (self.degree_z() as u64 * e as u64 > cap as u64 || self.degree_w() as u64 * e as u64 > cap as u64) {
            return Err(PolyError::DegreeCap { cap });
        }
        let mut out = Self::constant(C64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.checked_mul(self, cap)?;
        }
        Ok(out)
    }

    fn powers(x: C64, n: u32) -> Vec<C64> {
        let mut v = Vec::with_capacity(n as usize + 1);
        let mut acc = C64::new(1.0, 0.0);
        v.push(acc);
        for _ in 0..n {
            acc *= x;
            v.push(acc);
        }
        v
    }

    pub fn eval(&self, p: CPoint) -> C64 {
        let zp = Self::powers(p.z, self.degree_z());
        let wp = Self::powers(p.w, self.degree_w());
        self.terms().map(|((a, b), c)| c * zp[a as usize] * wp[b as usize]).sum()
    }

    /// Value and holomorphic derivatives up to second order.
    pub fn jet(&self, p: CPoint) -> Jet {
        let zp = Self::powers(p.z, self.degree_z());
        let wp = Self::powers(p.w, self.degree_w());
        let mut j = Jet::default();
        for ((a, b), c) in self.terms() {
            let (a, b) = (a as usize, b as usize);
            j.v += c * zp[a] * wp[b];
            if a >= 1 {
                j.dz += c * (a as f64) * zp[a - 1] * wp[b];
            }
            if b >= 1 {
                j.dw += c * (b as f64) * zp[a] * wp[b - 1];
            }
            if a >= 2 {
                j.dzz += c * ((a * (a - 1)) as f64) * zp[a - 2] * wp[b];
            }
            if a >= 1 && b >= 1 {
                j.dzw += c * ((a * b) as f64) * zp[a - 1] * wp[b - 1];
            }
            if b >= 2 {
                j.dww += c * ((b * (b - 1)) as f64) * zp[a] * wp[b - 2];
            }
        }
        j
    }

    /// Whether `|P(p)|` is below the coefficient-scaled vanishing tolerance.
    /// `sum |c| |z|^a |w|^b`, the natural scale for the rounding error of
    /// [`CPoly2::eval`] at `p`.
    pub fn abs_eval(&self, p: CPoint) -> f64 {
        let (az, aw) = (p.z.norm(), p.w.norm());
        self.terms.iter().map(|((a, b), c)| c.norm() * az.powi(*a as i32) * aw.powi(*b as i32)).sum()
    }

    pub fn vanishes_at(&self, p: CPoint) -> bool {
        self.is_zero() || self.eval(p).norm() <= VANISHING_TOL * self.coeff_scale()
    }
}

impl Add for &CPoly2 {
    type Output = CPoly2;
    fn add(self, rhs: &CPoly2) -> CPoly2 {
        let mut out = self.clone();
        for ((a, b), c) in rhs.terms() {
            out.add_term(a, b, c);
        }
        out
    }
}

impl Sub for &CPoly2 {
    type Output = CPoly2;
    fn sub(self, rhs: &CPoly2) -> CPoly2 {
        let mut out = self.clone();
        for ((a, b), c) in rhs.terms() {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Neg for &CPoly2 {
    type Output = CPoly2;
    fn neg(self) -> CPoly2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for &CPoly2 {
    type Output = CPoly2;
    fn mul(self, rhs: &CPoly2) -> CPoly2 {
        self.checked_mul(rhs, u32::MAX / 2).expect("uncapped multiplication")
    }
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("({})", c.re)
        } else {
            format!("{}", c.re)
        }
    } else if c.re == 0.0 {
        format!("({}*i)", c.im)
    } else if c.im < 0.0 {
        format!("({}-{}*i)", c.re, -c.im)
    } else {
        format!("({}+{}*i)", c.re, c.im)
    }
}

/// Prints in the input grammar, so `parse(p.to_string())` reproduces `p`.
impl fmt::Display for CPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "{}", fmt_coeff(c))?;
            match a {
                0 => {}
                1 => write!(f, "*z")?,
                _ => write!(f, "*z^{a}")?,
            }
            match b {
                0 => {}
                1 => write!(f, "*w")?,
                _ => write!(f, "*w^{b}")?,
            }
        }
        Ok(())
    }
}

/// Value of a rational map at a point of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtValue {
    Finite(C64),
    Infinity,
    Indeterminate,
}

/// A rational map `F = P/Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    numerator: CPoly2,
    denominator: CPoly2,
    squarefree_checked: bool,
}

impl RationalMap {
    pub fn new(numerator: CPoly2, denominator: CPoly2) -> Result<Self, PolyError> {
        if denominator.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if numerator.is_constant() && denominator.is_constant() {
            return Err(PolyError::ConstantMap);
        }
        let finite = numerator
            .terms()
            .chain(denominator.terms())
            .all(|(_, c)| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(PolyError::NonFinite);
        }
        Ok(Self { numerator, denominator, squarefree_checked: false })
    }

    pub fn polynomial(p: CPoly2) -> Result<Self, PolyError> {
        Self::new(p, CPoly2::constant(C64::new(1.0, 0.0)))
    }

    pub fn numerator(&self) -> &CPoly2 {
        &self.numerator
    }

    pub fn denominator(&self) -> &CPoly2 {
        &self.denominator
    }

    pub fn squarefree_checked(&self) -> bool {
        self.squarefree_checked
    }

    /// Runs [`squarefree_heuristic`] and records a positive outcome.
    pub fn check_squarefree(&mut self) -> bool {
        let ok = squarefree_heuristic(self);
        self.squarefree_checked = ok;
        ok
    }

    /// Both polynomials, skipping a constant denominator.
    pub fn divisor_polys(&self) -> Vec<&CPoly2> {
        let mut v = Vec::with_capacity(2);
        if !self.numerator.is_constant() {
            v.push(&self.numerator);
        }
        if !self.denominator.is_constant() {
            v.push(&self.denominator);
        }
        v
    }

    pub fn eval(&self, p: CPoint) -> ExtValue {
        let num = self.numerator.eval(p);
        let den = self.denominator.eval(p);
        let num_zero = self.numerator.is_zero() || num.norm() <= VANISHING_TOL * self.numerator.coeff_scale();
        let den_zero = den.norm() <= VANISHING_TOL * self.denominator.coeff_scale();
        match (num_zero, den_zero) {
            (true, true) => ExtValue::Indeterminate,
            (false, true) => ExtValue::Infinity,
            _ => ExtValue::Finite(num / den),
        }
    }

    /// `(dF/dz, dF/dw)` by the quotient rule.
    pub fn wirtinger_grad(&self, p: CPoint) -> Result<(C64, C64), PolyError> {
        let pj = self.numerator.jet(p);
        let qj = self.denominator.jet(p);
        if qj.v.norm() <= VANISHING_TOL * self.denominator.coeff_scale() {
            return Err(PolyError::PoleAtPoint);
        }
        let q2 = qj.v * qj.v;
        Ok(((pj.dz * qj.v - pj.v * qj.dz) / q2, (pj.dw * qj.v - pj.v * qj.dw) / q2))
    }

    /// The gradient of `arg F` in `R^4`, as a complex pair: `conj(grad F / (i F))`.
    /// `None` at zeros and poles.
    pub fn arg_gradient(&self, p: CPoint) -> Option<(C64, C64)> {
        let pj = self.numerator.jet(p);
        let qj = self.denominator.jet(p);
        if pj.v == C64::new(0.0, 0.0) || qj.v == C64::new(0.0, 0.0) {
            return None;
        }
        let i = C64::new(0.0, 1.0);
        let gz = (pj.dz / pj.v - qj.dz / qj.v) / i;
        let gw = (pj.dw / pj.v - qj.dw / qj.v) / i;
        Some((gz.conj(), gw.conj()))
    }

    /// `F(p)` as a plain complex number, `None` at zeros/poles within tolerance.
    pub fn eval_regular(&self, p: CPoint) -> Option<C64> {
        let num = self.numerator.eval(p);
        let den = self.denominator.eval(p);
        if num.norm() <= VANISHING_TOL * self.numerator.coeff_scale()
            || den.norm() <= VANISHING_TOL * self.denominator.coeff_scale()
        {
            return None;
        }
        let v = num / den;
        v.is_finite().then_some(v)
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.numerator, self.denominator)
    }
}

// ----------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cap: u32,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CPoly2, PolyError> {
        // A leading sign is accepted in addition to the bare grammar.
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
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

    fn term(&mut self) -> Result<CPoly2, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs, self.cap)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CPoly2, PolyError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected unsigned integer exponent");
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            let e: u32 = match text.parse() {
                Ok(e) => e,
                Err(_) => return Err(PolyError::DegreeCap { cap: self.cap }),
            };
            return base.checked_pow(e, self.cap);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<CPoly2, PolyError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(CPoly2::z())
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(CPoly2::w())
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(CPoly2::constant(C64::new(0.0, 1.0)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.decimal(),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn decimal(&mut self) -> Result<CPoly2, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(CPoly2::constant(C64::new(v, 0.0))),
            _ => {
                self.pos = start;
                self.err(format!("malformed number '{text}'"))
            }
        }
    }
}

/// Parses a polynomial expression (no division).
pub fn parse_poly(text: &str) -> Result<CPoly2, PolyError> {
    parse_poly_capped(text, DEFAULT_DEGREE_CAP)
}

pub fn parse_poly_capped(text: &str, cap: u32) -> Result<CPoly2, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, cap };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses `P` or `P / Q`, splitting at the single top-level `/`.
pub fn parse_rational(text: &str) -> Result<RationalMap, PolyError> {
    parse_rational_capped(text, DEFAULT_DEGREE_CAP)
}

pub fn parse_rational_capped(text: &str, cap: u32) -> Result<RationalMap, PolyError> {
    let mut depth = 0i32;
    let mut slash = None;
    for (i, c) in text.bytes().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'/' if depth == 0 => {
                if slash.is_some() {
                    return Err(PolyError::Syntax { pos: i, msg: "more than one top-level '/'".into() });
                }
                slash = Some(i);
            }
            b'/' => return Err(PolyError::Syntax { pos: i, msg: "'/' inside parentheses".into() }),
            _ => {}
        }
    }
    let (num_text, den_text) = match slash {
        Some(i) => (&text[..i], Some((i + 1, &text[i + 1..]))),
        None => (text, None),
    };
    let numerator = parse_poly_capped(num_text, cap)?;
    let denominator = match den_text {
        Some((offset, t)) => parse_poly_capped(t, cap).map_err(|e| match e {
            PolyError::Syntax { pos, msg } => PolyError::Syntax { pos: pos + offset, msg },
            other => other,
        })?,
        None => CPoly2::constant(C64::new(1.0, 0.0)),
    };
    RationalMap::new(numerator, denominator)
}

// ----------------------------------------------------------------------------
// Squarefree heuristic

const SQUAREFREE_SEEDS: usize = 64;
const SQUAREFREE_BALL: f64 = 4.0;
const SQUAREFREE_RNG_SEED: u64 = 0x005e_ed5f;

/// Gauss-Newton on the overdetermined holomorphic system `(f, f_z, f_w) = 0`.
fn singular_point_search(f: &CPoly2, start: CPoint) -> Option<CPoint> {
    let scale = f.coeff_scale();
    let mut x = start;
    for _ in 0..100 {
        let j = f.jet(x);
        let g = [j.v, j.dz, j.dw];
        let jac = [[j.dz, j.dw], [j.dzz, j.dzw], [j.dzw, j.dww]];
        let step = linalg::complex_lstsq_3x2(&jac, &g)?;
        x = CPoint::new(x.z - step[0], x.w - step[1]);
        if !x.is_finite() || x.norm() > 1e6 {
            return None;
        }
        let small_step = (step[0].norm_sqr() + step[1].norm_sqr()).sqrt() <= 1e-13 * (1.0 + x.norm());
        if small_step {
            break;
        }
    }
    // each of f, f_z, f_w must vanish relative to the size of its own terms
    let j = f.jet(x);
    let (fz, fw) = (f.diff_z(), f.diff_w());
    let ok = [(j.v, f), (j.dz, &fz), (j.dw, &fw)]
        .iter()
        .all(|(v, g)| v.norm() <= 1e-9 * g.abs_eval(x).max(1e-300 * scale));
    ok.then_some(x)
}

fn ball_seed(rng: &mut ChaCha8Rng, radius: f64) -> CPoint {
    let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let r = radius * rng.random::<f64>().powf(0.25);
    CPoint::from_real(g.map(|v| v / n * r))
}

/// Whether the singular set of `{f = 0}` looks one-dimensional near a found
/// singular point: nearby restarts should all return to an isolated point.
fn has_curve_of_singularities(f: &CPoly2, rng: &mut ChaCha8Rng) -> bool {
    if f.is_constant() {
        return false;
    }
    for _ in 0..SQUAREFREE_SEEDS {
        let seed = ball_seed(rng, SQUAREFREE_BALL);
        let Some(x) = singular_point_search(f, seed) else { continue };
        let delta = 1e-2 * (1.0 + x.norm());
        for _ in 0..8 {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let dx = CPoint::from_real(g.map(|v| v / n * delta));
            let near = CPoint::new(x.z + dx.z, x.w + dx.w);
            if let Some(y) = singular_point_search(f, near) {
                if y.dist(x) > delta / 10.0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Seeded search for repeated factors of `P` or `Q`.
///
/// Returns `true` when no curve of common zeros of `(poly, d/dz poly,
/// d/dw poly)` is found. Isolated singular points of a reduced curve (such as
/// the node of `zw`) do not count against it.
pub fn squarefree_heuristic(f: &RationalMap) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SQUAREFREE_RNG_SEED);
    !(has_curve_of_singularities(f.numerator(), &mut rng)
        || has_curve_of_singularities(f.denominator(), &mut rng))
}
