//! Sparse polynomials in `z_1..z_m` and `z̄_1..z̄_m` with exact Gaussian
//! rational coefficients.
//!
//! The variables `z_j` and `z̄_j` are treated as independent symbols, so the
//! Wirtinger operators `∂/∂z_j` and `∂/∂z̄_j` act as ordinary formal partial
//! derivatives. Floating point only appears in [`WPolynomial::eval`] and in
//! [`CompiledPoly`].
//!
//! Variable indices are zero-based throughout the API; the textual form
//! (`Display`) uses one-based names `z1`, `zb1`, ...

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CrError, Result};
use crate::gaussian::{format_rational, GaussianRational};

/// Exponent vectors of a monomial `z^alpha · z̄^beta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiDegree {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl MultiDegree {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(CrError::DimensionMismatch { expected: alpha.len(), found: beta.len() });
        }
        if alpha.is_empty() {
            return Err(CrError::InvalidArgument("a monomial needs at least one variable".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn constant(m: usize) -> Self {
        Self { alpha: vec![0; m], beta: vec![0; m] }
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>()
    }

    /// The monomial of the complex conjugate: `z` and `z̄` exponents swap.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta.clone(), beta: self.alpha.clone() }
    }

    fn product(&self, other: &Self) -> Self {
        Self {
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a + b).collect(),
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
        }
    }

    /// True when the monomial involves `z_j` or `z̄_j`.
    pub fn involves(&self, j: usize) -> bool {
        self.alpha[j] > 0 || self.beta[j] > 0
    }
}

// Graded lexicographic on alpha ++ beta.
impl Ord for MultiDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.alpha.iter().chain(&self.beta).cmp(other.alpha.iter().chain(&other.beta)))
    }
}

impl PartialOrd for MultiDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which binary operation [`poly_arith`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Polynomial in `z, z̄` kept in canonical form: no zero coefficients, terms
/// ordered by [`MultiDegree`]'s graded lex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct WPolynomial {
    m: usize,
    terms: BTreeMap<MultiDegree, GaussianRational>,
}

impl WPolynomial {
    pub fn zero(m: usize) -> Self {
        Self { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: GaussianRational) -> Self {
        Self::zero(m).with_term(MultiDegree::constant(m), c)
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, GaussianRational::one())
    }

    /// `c · z^alpha · z̄^beta`.
    pub fn monomial(alpha: Vec<u32>, beta: Vec<u32>, c: GaussianRational) -> Result<Self> {
        let deg = MultiDegree::new(alpha, beta)?;
        let m = deg.m();
        Ok(Self::zero(m).with_term(deg, c))
    }

    /// The coordinate function `z_j`.
    pub fn z(m: usize, j: usize) -> Result<Self> {
        check_index(m, j)?;
        let mut deg = MultiDegree::constant(m);
        deg.alpha[j] = 1;
        Ok(Self::zero(m).with_term(deg, GaussianRational::one()))
    }

    /// The coordinate function `z̄_j`.
    pub fn zbar(m: usize, j: usize) -> Result<Self> {
        check_index(m, j)?;
        let mut deg = MultiDegree::constant(m);
        deg.beta[j] = 1;
        Ok(Self::zero(m).with_term(deg, GaussianRational::one()))
    }

    /// `|z_j|² = z_j z̄_j`.
    pub fn abs_sq(m: usize, j: usize) -> Result<Self> {
        Ok(&Self::z(m, j)? * &Self::zbar(m, j)?)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zero coefficients.
    pub fn from_terms<I>(m: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiDegree, GaussianRational)>,
    {
        let mut p = Self::zero(m);
        for (deg, c) in terms {
            if deg.m() != m {
                return Err(CrError::DimensionMismatch { expected: m, found: deg.m() });
            }
            p.accumulate(deg, &c);
        }
        p.prune();
        Ok(p)
    }

    fn with_term(mut self, deg: MultiDegree, c: GaussianRational) -> Self {
        self.accumulate(deg, &c);
        self.prune();
        self
    }

    fn accumulate(&mut self, deg: MultiDegree, c: &GaussianRational) {
        *self.terms.entry(deg).or_insert_with(GaussianRational::zero) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiDegree, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, deg: &MultiDegree) -> GaussianRational {
        self.terms.get(deg).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|d| i64::from(d.total_degree())).max().unwrap_or(-1)
    }

    fn ensure_same_m(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(CrError::DimensionMismatch { expected: self.m, found: other.m });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_m(other)?;
        let mut out = self.clone();
        for (deg, c) in &other.terms {
            out.accumulate(deg.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_m(other)?;
        let mut out = Self::zero(self.m);
        for (da, ca) in &self.terms {
            for (db, cb) in &other.terms {
                out.accumulate(da.product(db), &(ca * cb));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self {
            m: self.m,
            terms: self.terms.iter().map(|(d, k)| (d.clone(), k * c)).collect(),
        };
        out.prune();
        out
    }

    /// Complex conjugate: `c z^α z̄^β ↦ c̄ z^β z̄^α`.
    pub fn conj(&self) -> Self {
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(d, c)| (d.swapped(), c.conj())).collect(),
        }
    }

    /// Real-valued on `ℂ^m` iff the polynomial equals its conjugate.
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// `(p + p̄) / 2`.
    pub fn real_part(&self) -> Self {
        (self + &self.conj()).scale(&GaussianRational::from_ratio(1, 2))
    }

    /// `(p − p̄) / (2i)`.
    pub fn imag_part(&self) -> Self {
        // 1/(2i) = -i/2
        let k = GaussianRational::new(BigRational::zero(), BigRational::new((-1).into(), 2.into()));
        (self - &self.conj()).scale(&k)
    }

    /// Formal `∂/∂z_j`.
    pub fn d_z(&self, j: usize) -> Result<Self> {
        check_index(self.m, j)?;
        Ok(self.differentiate(|d| &mut d.alpha[j]))
    }

    /// Formal `∂/∂z̄_j`.
    pub fn d_zbar(&self, j: usize) -> Result<Self> {
        check_index(self.m, j)?;
        Ok(self.differentiate(|d| &mut d.beta[j]))
    }

    fn differentiate(&self, slot: impl Fn(&mut MultiDegree) -> &mut u32) -> Self {
        let mut out = Self::zero(self.m);
        for (deg, c) in &self.terms {
            let mut d = deg.clone();
            let e = slot(&mut d);
            if *e == 0 {
                continue;
            }
            let k = GaussianRational::from_integers(i64::from(*e), 0);
            *e -= 1;
            out.accumulate(d, &(c * &k));
        }
        out.prune();
        out
    }

    /// The gradient `(∂p/∂z̄_1, …, ∂p/∂z̄_m)`.
    pub fn zbar_gradient(&self) -> Vec<Self> {
        (0..self.m).map(|j| self.differentiate(|d| &mut d.beta[j])).collect()
    }

    /// The gradient `(∂p/∂z_1, …, ∂p/∂z_m)`.
    pub fn z_gradient(&self) -> Vec<Self> {
        (0..self.m).map(|j| self.differentiate(|d| &mut d.alpha[j])).collect()
    }

    /// Evaluates `Σ c z^α z̄^β` in canonical term order.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.m {
            return Err(CrError::DimensionMismatch { expected: self.m, found: z.len() });
        }
        Ok(self.compile().eval_unchecked(z))
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.alpha.clone(), d.beta.clone(), c.to_complex64()))
                .collect(),
        }
    }

    /// Re-indexes into `new_m` variables, sending variable `j` to `mapping[j]`.
    pub fn relabel(&self, new_m: usize, mapping: &[usize]) -> Result<Self> {
        if mapping.len() != self.m {
            return Err(CrError::DimensionMismatch { expected: self.m, found: mapping.len() });
        }
        for &t in mapping {
            check_index(new_m, t)?;
        }
        let mut out = Self::zero(new_m);
        for (deg, c) in &self.terms {
            let mut d = MultiDegree::constant(new_m);
            for (j, &t) in mapping.iter().enumerate() {
                d.alpha[t] += deg.alpha[j];
                d.beta[t] += deg.beta[j];
            }
            out.accumulate(d, c);
        }
        out.prune();
        Ok(out)
    }

    /// Sets every variable not listed in `keep` to zero and re-indexes the
    /// survivors as `0..keep.len()` in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            check_index(self.m, k)?;
        }
        let mut out = Self::zero(keep.len());
        for (deg, c) in &self.terms {
            let outside = (0..self.m).any(|j| !keep.contains(&j) && deg.involves(j));
            if outside {
                continue;
            }
            let d = MultiDegree {
                alpha: keep.iter().map(|&k| deg.alpha[k]).collect(),
                beta: keep.iter().map(|&k| deg.beta[k]).collect(),
            };
            out.accumulate(d, c);
        }
        out.prune();
        Ok(out)
    }

    /// Same polynomial viewed in `new_m ≥ m` variables.
    pub fn extend_vars(&self, new_m: usize) -> Result<Self> {
        if new_m < self.m {
            return Err(CrError::DimensionMismatch { expected: self.m, found: new_m });
        }
        let mapping: Vec<usize> = (0..self.m).collect();
        self.relabel(new_m, &mapping)
    }
}

fn check_index(m: usize, j: usize) -> Result<()> {
    if j >= m {
        return Err(CrError::IndexOutOfRange { index: j, m });
    }
    Ok(())
}

/// `a op b` with a dimension check.
pub fn poly_arith(a: &WPolynomial, b: &WPolynomial, op: ArithOp) -> Result<WPolynomial> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

// Operator forms panic on a variable-count mismatch; use the `try_*` methods
// for untrusted inputs.
impl Add for &WPolynomial {
    type Output = WPolynomial;
    fn add(self, rhs: Self) -> WPolynomial {
        self.try_add(rhs).expect("polynomial variable counts differ")
    }
}

impl Sub for &WPolynomial {
    type Output = WPolynomial;
    fn sub(self, rhs: Self) -> WPolynomial {
        self.try_sub(rhs).expect("polynomial variable counts differ")
    }
}

impl Mul for &WPolynomial {
    type Output = WPolynomial;
    fn mul(self, rhs: Self) -> WPolynomial {
        self.try_mul(rhs).expect("polynomial variable counts differ")
    }
}

impl Neg for &WPolynomial {
    type Output = WPolynomial;
    fn neg(self) -> WPolynomial {
        WPolynomial {
            m: self.m,
            terms: self.terms.iter().map(|(d, c)| (d.clone(), -c.clone())).collect(),
        }
    }
}

impl fmt::Display for WPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (deg, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (j, &a) in deg.alpha.iter().enumerate() {
                push_factor(&mut factors, "z", j, a);
            }
            for (j, &b) in deg.beta.iter().enumerate() {
                push_factor(&mut factors, "zb", j, b);
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

fn push_factor(out: &mut Vec<String>, name: &str, j: usize, e: u32) {
    match e {
        0 => {}
        1 => out.push(format!("{name}{}", j + 1)),
        _ => out.push(format!("{name}{}^{e}", j + 1)),
    }
}

/// Floating-point snapshot of a [`WPolynomial`] for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    m: usize,
    terms: Vec<(Vec<u32>, Vec<u32>, Complex64)>,
}

impl CompiledPoly {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.m {
            return Err(CrError::DimensionMismatch { expected: self.m, found: z.len() });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (alpha, beta, c) in &self.terms {
            let mut t = *c;
            for (j, zj) in z.iter().enumerate() {
                if alpha[j] > 0 {
                    t *= zj.powu(alpha[j]);
                }
                if beta[j] > 0 {
                    t *= zj.conj().powu(beta[j]);
                }
            }
            acc += t;
        }
        acc
    }
}

/// Central-difference estimate of `∂f/∂z̄_j = ½(∂f/∂x_j + i ∂f/∂y_j)`.
pub fn wirtinger_fd<F>(f: F, z: &[Complex64], j: usize, h: f64) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let (dx, dy) = real_partials(&f, z, j, h);
    0.5 * (dx + Complex64::i() * dy)
}

/// Central-difference estimate of `∂f/∂z_j = ½(∂f/∂x_j − i ∂f/∂y_j)`.
pub fn wirtinger_fd_z<F>(f: F, z: &[Complex64], j: usize, h: f64) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let (dx, dy) = real_partials(&f, z, j, h);
    0.5 * (dx - Complex64::i() * dy)
}

fn real_partials<F>(f: &F, z: &[Complex64], j: usize, h: f64) -> (Complex64, Complex64)
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let mut w = z.to_vec();
    let shifted = |w: &mut Vec<Complex64>, delta: Complex64| {
        w[j] = z[j] + delta;
        let v = f(w);
        w[j] = z[j];
        v
    };
    let dx = (shifted(&mut w, Complex64::new(h, 0.0)) - shifted(&mut w, Complex64::new(-h, 0.0))) / (2.0 * h);
    let dy = (shifted(&mut w, Complex64::new(0.0, h)) - shifted(&mut w, Complex64::new(0.0, -h))) / (2.0 * h);
    (dx, dy)
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    beta: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    m: usize,
    terms: Vec<TermJson>,
}

impl TryFrom<PolyJson> for WPolynomial {
    type Error = CrError;

    fn try_from(raw: PolyJson) -> Result<Self> {
        if raw.m == 0 {
            return Err(CrError::Parse("polynomial needs m >= 1".into()));
        }
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                let deg = MultiDegree::new(t.alpha, t.beta)?;
                let c = GaussianRational::parse_parts(&t.re, &t.im)?;
                Ok((deg, c))
            })
            .collect::<Result<Vec<_>>>()?;
        WPolynomial::from_terms(raw.m, terms)
    }
}

impl From<WPolynomial> for PolyJson {
    fn from(p: WPolynomial) -> Self {
        PolyJson {
            m: p.m,
            terms: p
                .terms
                .into_iter()
                .map(|(d, c)| TermJson {
                    alpha: d.alpha,
                    beta: d.beta,
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
    }
}
