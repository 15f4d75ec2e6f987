//! Exact sparse polynomials over the rationals in spatial variables `x1..xn`
//! and one time variable `t`.
//!
//! A term `x^a t^b` carries two degrees: the total degree `|a| + b` and the
//! parabolic degree `|a| + 2b` (time counts double because the heat equation
//! scales `t` like `x^2`). Terms are stored in a `BTreeMap` under a canonical
//! graded order, so polynomial equality is map equality and every iteration
//! is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate. Always stored reduced,
/// with a positive denominator.
pub type Rational = BigRational;

/// Rational from an integer pair. Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rational_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// `r^e` by repeated multiplication; exponents stay small here.
pub fn rational_pow(r: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// A monomial `x1^a1 … xn^an t^b`.
///
/// The ordering is the canonical basis order used everywhere in the crate
/// (matrix columns, basis enumeration, term formatting): ascending total
/// degree, then ascending time exponent, then descending lexicographic on
/// the spatial exponents. Constants first, `x1` before `x2`, `x1` before `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    spatial: Vec<u32>,
    time: u32,
}

impl Monomial {
    pub fn new(spatial: Vec<u32>, time: u32) -> Self {
        Monomial { spatial, time }
    }

    /// The constant monomial `1` in ambient dimension `n`.
    pub fn constant(n: usize) -> Self {
        Monomial {
            spatial: vec![0; n],
            time: 0,
        }
    }

    /// `x_{i+1}` (zero-based index `i`).
    pub fn variable(n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for dimension {n}");
        let mut spatial = vec![0; n];
        spatial[i] = 1;
        Monomial { spatial, time: 0 }
    }

    /// The time variable `t`.
    pub fn time_variable(n: usize) -> Self {
        Monomial {
            spatial: vec![0; n],
            time: 1,
        }
    }

    pub fn dimension(&self) -> usize {
        self.spatial.len()
    }

    pub fn spatial_exponents(&self) -> &[u32] {
        &self.spatial
    }

    pub fn time_exponent(&self) -> u32 {
        self.time
    }

    pub fn spatial_degree(&self) -> u32 {
        self.spatial.iter().sum()
    }

    pub fn total_degree(&self) -> u32 {
        self.spatial_degree() + self.time
    }

    pub fn parabolic_degree(&self) -> u32 {
        self.spatial_degree() + 2 * self.time
    }

    pub fn is_constant(&self) -> bool {
        self.time == 0 && self.spatial.iter().all(|&e| e == 0)
    }

    pub fn is_time_free(&self) -> bool {
        self.time == 0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.spatial.len(), other.spatial.len());
        Monomial {
            spatial: self
                .spatial
                .iter()
                .zip(&other.spatial)
                .map(|(a, b)| a + b)
                .collect(),
            time: self.time + other.time,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then(self.time.cmp(&other.time))
            // larger spatial tuple sorts earlier: x1 before x2
            .then_with(|| other.spatial.cmp(&self.spatial))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total and parabolic degree of a polynomial; both are `-1` exactly for the
/// zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeInfo {
    pub total_degree: i64,
    pub parabolic_degree: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} exceeds declared dimension {dim} (at byte {pos})")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        pos: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("time-integration span must be positive, got {span}")]
pub struct NonPositiveSpan {
    pub span: Rational,
}

/// Sparse exact polynomial in `x1..xn` and `t`.
///
/// Invariants: no stored coefficient is zero; all monomials have the ambient
/// dimension; the zero polynomial is the empty map. Operations on two
/// polynomials panic if their ambient dimensions differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceTimePolynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl SpaceTimePolynomial {
    pub fn zero(dim: usize) -> Self {
        SpaceTimePolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::constant(dim), value);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate polynomial `x_{i+1}` (zero-based `i`).
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::from_monomial(dim, Monomial::variable(dim, i), Rational::one())
    }

    /// The time polynomial `t`.
    pub fn time_variable(dim: usize) -> Self {
        Self::from_monomial(dim, Monomial::time_variable(dim), Rational::one())
    }

    pub fn from_monomial(dim: usize, mono: Monomial, coeff: Rational) -> Self {
        assert_eq!(mono.dimension(), dim, "monomial dimension mismatch");
        let mut p = Self::zero(dim);
        p.add_term(mono, coeff);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dimension(), dim, "monomial dimension mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Greatest monomial in the canonical order, with its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn is_time_free(&self) -> bool {
        self.terms.keys().all(Monomial::is_time_free)
    }

    /// Max total degree over terms, `-1` for zero.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Max of `|a| + 2b` over terms, `-1` for zero.
    pub fn parabolic_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.parabolic_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Max time exponent over terms, `-1` for zero.
    pub fn time_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.time_exponent() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn degree_info(&self) -> DegreeInfo {
        DegreeInfo {
            total_degree: self.total_degree(),
            parabolic_degree: self.parabolic_degree(),
        }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(
            self.dim, other.dim,
            "ambient dimension mismatch: {} vs {}",
            self.dim, other.dim
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        SpaceTimePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.dim);
        }
        SpaceTimePolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Self::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Scaled so that the leading (greatest canonical) coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rational::one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// `p(x + s, t)` by binomial expansion; the time variable is unshifted.
    pub fn shift_substitute(&self, shift: &[i64]) -> Self {
        assert_eq!(
            shift.len(),
            self.dim,
            "shift vector length {} does not match dimension {}",
            shift.len(),
            self.dim
        );
        let mut out = Self::zero(self.dim);
        for (mono, coeff) in &self.terms {
            // expand Π_i (x_i + s_i)^{a_i}, one variable at a time
            let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), coeff.clone())];
            for (i, &a) in mono.spatial.iter().enumerate() {
                let s = BigInt::from(shift[i]);
                let mut next = Vec::with_capacity(partial.len() * (a as usize + 1));
                for (exps, c) in &partial {
                    for j in 0..=a {
                        let binom = num_integer::binomial(BigInt::from(a), BigInt::from(j));
                        let mut pow = BigInt::one();
                        for _ in 0..(a - j) {
                            pow *= &s;
                        }
                        let factor = Rational::from_integer(binom * pow);
                        let mut e = exps.clone();
                        e.push(j);
                        next.push((e, c * factor));
                    }
                }
                partial = next;
            }
            for (exps, c) in partial {
                out.add_term(Monomial::new(exps, mono.time), c);
            }
        }
        out
    }

    /// `m`-th formal time derivative; `m = 0` is the identity.
    pub fn partial_t(&self, m: u32) -> Self {
        if m == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.dim);
        for (mono, coeff) in &self.terms {
            let b = mono.time;
            if b < m {
                continue;
            }
            // falling factorial b (b-1) … (b-m+1)
            let mut factor = BigInt::one();
            for j in 0..m {
                factor *= BigInt::from(b - j);
            }
            out.add_term(
                Monomial::new(mono.spatial.clone(), b - m),
                coeff * Rational::from_integer(factor),
            );
        }
        out
    }

    /// Exact `∫_{-T}^{0} p(x, t) dt`; the result is free of `t`.
    pub fn integrate_time(&self, span: &Rational) -> Result<Self, NonPositiveSpan> {
        if !span.is_positive() {
            return Err(NonPositiveSpan { span: span.clone() });
        }
        let mut out = Self::zero(self.dim);
        for (mono, coeff) in &self.terms {
            let b = mono.time;
            // ∫_{-T}^0 t^b dt = (-1)^b T^{b+1} / (b+1)
            let mut factor =
                rational_pow(span, b + 1) / Rational::from_integer(BigInt::from(b + 1));
            if b % 2 == 1 {
                factor = -factor;
            }
            out.add_term(Monomial::new(mono.spatial.clone(), 0), coeff * factor);
        }
        Ok(out)
    }

    /// `p(x, t0)` as a polynomial in `x` only.
    pub fn substitute_time(&self, t0: &Rational) -> Self {
        let mut out = Self::zero(self.dim);
        for (mono, coeff) in &self.terms {
            let factor = rational_pow(t0, mono.time);
            out.add_term(Monomial::new(mono.spatial.clone(), 0), coeff * factor);
        }
        out
    }

    /// Exact value at the lattice point `x` and time `t`.
    pub fn evaluate(&self, x: &[i64], t: &Rational) -> Rational {
        assert_eq!(
            x.len(),
            self.dim,
            "evaluation point length {} does not match dimension {}",
            x.len(),
            self.dim
        );
        let mut acc = Rational::zero();
        for (mono, coeff) in &self.terms {
            let mut v = coeff.clone();
            for (i, &a) in mono.spatial.iter().enumerate() {
                let mut pow = BigInt::one();
                for _ in 0..a {
                    pow *= BigInt::from(x[i]);
                }
                v *= Rational::from_integer(pow);
            }
            v *= rational_pow(t, mono.time);
            acc += v;
        }
        acc
    }

    /// Parse the text grammar: terms joined by `+`/`-`, each an optional
    /// rational coefficient followed by factors `x<i>[^e]` and `t[^e]`;
    /// whitespace insignificant. Variable indices are 1-based and must not
    /// exceed `dim`. `-` may be the ASCII hyphen or U+2212.
    pub fn parse(input: &str, dim: usize) -> Result<Self, ParseError> {
        Parser::new(input, dim).parse()
    }
}

impl Add for &SpaceTimePolynomial {
    type Output = SpaceTimePolynomial;
    fn add(self, other: Self) -> SpaceTimePolynomial {
        SpaceTimePolynomial::add(self, other)
    }
}

impl Sub for &SpaceTimePolynomial {
    type Output = SpaceTimePolynomial;
    fn sub(self, other: Self) -> SpaceTimePolynomial {
        SpaceTimePolynomial::sub(self, other)
    }
}

impl Mul for &SpaceTimePolynomial {
    type Output = SpaceTimePolynomial;
    fn mul(self, other: Self) -> SpaceTimePolynomial {
        SpaceTimePolynomial::mul(self, other)
    }
}

impl Neg for &SpaceTimePolynomial {
    type Output = SpaceTimePolynomial;
    fn neg(self) -> SpaceTimePolynomial {
        self.negate()
    }
}

impl fmt::Display for SpaceTimePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // leading term first
        for (i, (mono, coeff)) in self.terms.iter().rev().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = coeff.abs();
            let constant = mono.is_constant();
            if !abs.is_one() || constant {
                write!(f, "{abs}")?;
                if !constant {
                    write!(f, " ")?;
                }
            }
            let mut first = true;
            for (idx, &e) in mono.spatial.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "x{}", idx + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
            if mono.time > 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "t")?;
                if mono.time > 1 {
                    write!(f, "^{}", mono.time)?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str, dim: usize) -> Self {
        Parser {
            input,
            bytes: input.as_bytes(),
            pos: 0,
            dim,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Consumes '+' / '-' / U+2212; returns the sign or None.
    fn take_sign(&mut self) -> Option<i32> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1)
            }
            _ => {
                if self.input[self.pos..].starts_with('\u{2212}') {
                    self.pos += '\u{2212}'.len_utf8();
                    Some(-1)
                } else {
                    None
                }
            }
        }
    }

    fn take_digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos > start {
            Some(&self.input[start..self.pos])
        } else {
            None
        }
    }

    fn take_exponent(&mut self) -> Result<u32, ParseError> {
        let digits = self
            .take_digits()
            .ok_or_else(|| self.syntax("expected exponent digits after '^'"))?;
        digits
            .parse::<u32>()
            .map_err(|_| self.syntax(format!("exponent '{digits}' is too large")))
    }

    fn parse(mut self) -> Result<SpaceTimePolynomial, ParseError> {
        let mut poly = SpaceTimePolynomial::zero(self.dim);
        self.skip_ws();
        if self.pos == self.bytes.len() {
            return Err(self.syntax("empty input"));
        }
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos == self.bytes.len() {
                break;
            }
            let sign = if first {
                self.take_sign().unwrap_or(1)
            } else {
                self.take_sign()
                    .ok_or_else(|| self.syntax("expected '+' or '-' between terms"))?
            };
            first = false;
            self.skip_ws();
            let (mono, coeff) = self.parse_term()?;
            let signed = if sign < 0 { -coeff } else { coeff };
            poly.add_term(mono, signed);
        }
        Ok(poly)
    }

    fn parse_term(&mut self) -> Result<(Monomial, Rational), ParseError> {
        let mut coeff = Rational::one();
        let mut saw_anything = false;
        if let Some(digits) = self.take_digits() {
            saw_anything = true;
            let numerator: BigInt = digits.parse().expect("digit string");
            let mut value = Rational::from_integer(numerator);
            if self.peek() == Some(b'/') {
                self.pos += 1;
                let den_digits = self
                    .take_digits()
                    .ok_or_else(|| self.syntax("expected denominator digits after '/'"))?;
                let denominator: BigInt = den_digits.parse().expect("digit string");
                if denominator.is_zero() {
                    return Err(self.syntax("zero denominator"));
                }
                value /= Rational::from_integer(denominator);
            }
            coeff = value;
        }
        let mut spatial = vec![0u32; self.dim];
        let mut time = 0u32;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'x') => {
                    saw_anything = true;
                    self.pos += 1;
                    let idx_pos = self.pos;
                    let digits = self
                        .take_digits()
                        .ok_or_else(|| self.syntax("expected variable index after 'x'"))?;
                    let index: usize = digits
                        .parse()
                        .map_err(|_| self.syntax(format!("variable index '{digits}' too large")))?;
                    if index == 0 || index > self.dim {
                        return Err(ParseError::VariableOutOfRange {
                            index,
                            dim: self.dim,
                            pos: idx_pos,
                        });
                    }
                    let exp = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.take_exponent()?
                    } else {
                        1
                    };
                    spatial[index - 1] += exp;
                }
                Some(b't') => {
                    saw_anything = true;
                    self.pos += 1;
                    let exp = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.take_exponent()?
                    } else {
                        1
                    };
                    time += exp;
                }
                _ => break,
            }
        }
        if !saw_anything {
            return Err(self.syntax("expected a term"));
        }
        Ok((Monomial::new(spatial, time), coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> SpaceTimePolynomial {
        SpaceTimePolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn add_inverse_cancels() {
        let x = SpaceTimePolynomial::variable(1, 0);
        assert!((&x + &x.negate()).is_zero());
    }

    #[test]
    fn add_merges_like_terms() {
        assert_eq!(&p("x1^2 + t", 1) + &p("t", 1), p("x1^2 + 2t", 1));
    }

    #[test]
    fn add_exact_fractions() {
        let a = p("1/2 x1", 1);
        let b = p("1/3 x1", 1);
        assert_eq!(&a + &b, p("5/6 x1", 1));
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(&p("x1 + t", 1) * &p("x1 - t", 1), p("x1^2 - t^2", 1));
    }

    #[test]
    fn mul_square_expansion() {
        let u = p("x1^2 + t", 1);
        assert_eq!(&u * &u, p("x1^4 + 2 x1^2 t + t^2", 1));
    }

    #[test]
    fn mul_by_zero_annihilates() {
        let z = SpaceTimePolynomial::zero(1);
        assert!((&z * &p("x1^3 + 2t", 1)).is_zero());
    }

    #[test]
    fn mul_parabolic_degree_is_additive() {
        let a = p("x1^2 t + x1", 1);
        let b = p("t^2 - x1^3", 1);
        assert_eq!(
            (&a * &b).parabolic_degree(),
            a.parabolic_degree() + b.parabolic_degree()
        );
    }

    #[test]
    fn shift_binomial() {
        let sq = p("x1^2", 1);
        assert_eq!(sq.shift_substitute(&[1]), p("x1^2 + 2x1 + 1", 1));
    }

    #[test]
    fn shift_two_variables() {
        let q = p("x1 x2", 2);
        assert_eq!(q.shift_substitute(&[1, -1]), p("x1 x2 - x1 + x2 - 1", 2));
    }

    #[test]
    fn shift_leaves_time_alone() {
        let t = SpaceTimePolynomial::time_variable(1);
        assert_eq!(t.shift_substitute(&[7]), t);
    }

    #[test]
    fn shift_preserves_total_degree() {
        let q = p("x1^3 x2 + x2^2 t", 2);
        assert_eq!(
            q.shift_substitute(&[2, -3]).total_degree(),
            q.total_degree()
        );
    }

    #[test]
    fn partial_t_examples() {
        assert_eq!(p("x1^2 + t", 1).partial_t(1), p("1", 1));
        assert_eq!(p("t^3", 1).partial_t(2), p("6t", 1));
        assert!(p("x1^4", 1).partial_t(1).is_zero());
    }

    #[test]
    fn integrate_time_examples() {
        let one = Rational::one();
        assert_eq!(p("1", 1).integrate_time(&one).unwrap(), p("1", 1));
        assert_eq!(p("t", 1).integrate_time(&one).unwrap(), p("-1/2", 1));
        // ∫_{-4}^0 t^2 dt = 64/3
        assert_eq!(
            p("x1^2 t^2", 1).integrate_time(&rational_int(4)).unwrap(),
            p("64/3 x1^2", 1)
        );
        assert_eq!(
            p("t", 1).integrate_time(&rational_int(0)).unwrap_err(),
            NonPositiveSpan {
                span: Rational::zero()
            }
        );
    }

    #[test]
    fn evaluate_examples() {
        assert!(p("x1^2 + t", 1).evaluate(&[2], &rational_int(-4)).is_zero());
        assert_eq!(
            p("x1 x2", 2).evaluate(&[3, -2], &Rational::zero()),
            rational_int(-6)
        );
        assert_eq!(
            p("1/2 x1 + 1/3", 1).evaluate(&[1], &Rational::zero()),
            rational(5, 6)
        );
    }

    #[test]
    fn parse_literal_terms() {
        let q = p("x1^2 + t", 1);
        assert_eq!(q.num_terms(), 2);
        assert_eq!(q.coefficient(&Monomial::new(vec![2], 0)), Rational::one());
        assert_eq!(q.coefficient(&Monomial::new(vec![0], 1)), Rational::one());

        let r = p("-1/6 x1^2 + 1/6 x1^4", 1);
        assert_eq!(r.num_terms(), 2);
        assert_eq!(r.coefficient(&Monomial::new(vec![2], 0)), rational(-1, 6));
    }

    #[test]
    fn parse_mixed_term() {
        let q = p("3/2 x1^2 t + x2 - 1", 2);
        assert_eq!(q.coefficient(&Monomial::new(vec![2, 0], 1)), rational(3, 2));
        assert_eq!(
            q.coefficient(&Monomial::new(vec![0, 1], 0)),
            Rational::one()
        );
        assert_eq!(q.coefficient(&Monomial::constant(2)), rational_int(-1));
    }

    #[test]
    fn parse_unicode_minus() {
        assert_eq!(p("x1 \u{2212} 1", 1), p("x1 - 1", 1));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            SpaceTimePolynomial::parse("x1 + ", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            SpaceTimePolynomial::parse("", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            SpaceTimePolynomial::parse("1/0", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert_eq!(
            SpaceTimePolynomial::parse("x3", 2),
            Err(ParseError::VariableOutOfRange {
                index: 3,
                dim: 2,
                pos: 1
            })
        );
    }

    #[test]
    fn format_zero_is_canonical() {
        assert_eq!(SpaceTimePolynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn format_round_trips() {
        for s in [
            "x1^2 + t",
            "-1/6 x1^2 + 1/6 x1^4",
            "3/2 x1^2 t + x2 - 1",
            "x1 x2 - x1 + x2 - 1",
            "5/6 x1",
            "-7",
            "t^3 - t",
        ] {
            let n = 2;
            let q = p(s, n);
            assert_eq!(
                SpaceTimePolynomial::parse(&q.to_string(), n).unwrap(),
                q,
                "round trip failed for {s}"
            );
        }
    }

    #[test]
    fn canonical_order_matches_basis_convention() {
        // 1 < x1 < x2 < t < x1^2
        let one = Monomial::constant(2);
        let x1 = Monomial::variable(2, 0);
        let x2 = Monomial::variable(2, 1);
        let t = Monomial::time_variable(2);
        let x1sq = Monomial::new(vec![2, 0], 0);
        assert!(one < x1 && x1 < x2 && x2 < t && t < x1sq);
    }

    #[test]
    fn degrees_of_zero_are_minus_one() {
        let z = SpaceTimePolynomial::zero(3);
        assert_eq!(
            z.degree_info(),
            DegreeInfo {
                total_degree: -1,
                parabolic_degree: -1
            }
        );
    }

    #[test]
    fn parabolic_degree_counts_time_twice() {
        assert_eq!(p("x1^2 t^3", 1).parabolic_degree(), 8);
        assert_eq!(p("x1^2 t^3", 1).total_degree(), 5);
    }
}
