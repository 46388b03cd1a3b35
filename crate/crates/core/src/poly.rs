//! Exact polynomial arithmetic: `Z[A, B, d]` for brackets and weights, `Z[A, A^-1]` for the
//! reduced bracket and Jones polynomial.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exponents of `A`, `B` and `d`. Ordered lexicographically with `A` most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub d: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0, d: 0 };

    pub fn new(a: u32, b: u32, d: u32) -> Self {
        Monomial { a, b, d }
    }

    fn mul(self, o: Monomial) -> Monomial {
        Monomial { a: self.a + o.a, b: self.b + o.b, d: self.d + o.d }
    }

    fn divides(self, o: Monomial) -> bool {
        self.a <= o.a && self.b <= o.b && self.d <= o.d
    }

    fn div(self, o: Monomial) -> Monomial {
        Monomial { a: self.a - o.a, b: self.b - o.b, d: self.d - o.d }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// An element of `Z[A, B, d]` stored sparsely; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BracketPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl BracketPoly {
    pub fn zero() -> Self {
        BracketPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        BracketPoly { terms }
    }

    pub fn a() -> Self {
        Self::term(1, Monomial::new(1, 0, 0))
    }

    pub fn b() -> Self {
        Self::term(1, Monomial::new(0, 1, 0))
    }

    pub fn d() -> Self {
        Self::term(1, Monomial::new(0, 0, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::ONE).is_some_and(|c| c.is_one())
    }

    /// Terms in ascending lexicographic order of `(a, b, d)`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> BigInt {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BracketPoly::one();
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

    /// Multiplies by a single monomial with coefficient one.
    pub fn shift(&self, m: Monomial) -> Self {
        BracketPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    fn leading(&self) -> Option<(Monomial, &BigInt)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// Returns `r` with `r * divisor == self`, by long division under lex order.
    pub fn exact_divide(&self, divisor: &BracketPoly) -> Result<BracketPoly, PolyError> {
        let (lm_q, lc_q) = divisor.leading().ok_or(PolyError::DivisionByZero)?;
        let lc_q = lc_q.clone();
        let mut rem = self.clone();
        let mut quot = BracketPoly::zero();
        while let Some((lm_p, lc_p)) = rem.leading() {
            if !lm_q.divides(lm_p) {
                return Err(PolyError::NotDivisible);
            }
            let (c, r) = (lc_p / &lc_q, lc_p % &lc_q);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            let m = lm_p.div(lm_q);
            let t = BracketPoly::term(c, m);
            rem = &rem - &(&t * divisor);
            quot += &t;
        }
        Ok(quot)
    }

    /// Substitutes `B -> A^-1` and `d -> -A^-2 - A^2`.
    pub fn reduce_to_laurent(&self) -> LaurentA {
        let loop_value = LaurentA::loop_value();
        let mut d_powers: Vec<LaurentA> = vec![LaurentA::one()];
        let mut out = LaurentA::zero();
        for (m, c) in &self.terms {
            while d_powers.len() <= m.d as usize {
                let next = d_powers.last().unwrap() * &loop_value;
                d_powers.push(next);
            }
            let shift = i64::from(m.a) - i64::from(m.b);
            for (e, k) in &d_powers[m.d as usize].terms {
                out.add_term(e + shift, &(k * c));
            }
        }
        out
    }
}

impl fmt::Debug for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_factor(out: &mut String, name: char, e: u32) {
    if e == 0 {
        return;
    }
    if !out.is_empty() {
        out.push('*');
    }
    out.push(name);
    if e > 1 {
        let _ = write!(out, "^{e}");
    }
}

fn write_signed_terms<W, I>(f: &mut W, terms: I) -> fmt::Result
where
    W: fmt::Write,
    I: Iterator<Item = (String, BigInt)>,
{
    let mut first = true;
    for (body, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if body.is_empty() {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            f.write_str(&body)?;
        } else {
            write!(f, "{mag}*{body}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Canonical rendering: terms in descending lexicographic order, e.g. `A^2*d + 2*A*B + B^2*d`.
impl fmt::Display for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(
            f,
            self.terms.iter().rev().map(|(m, c)| {
                let mut body = String::new();
                write_factor(&mut body, 'A', m.a);
                write_factor(&mut body, 'B', m.b);
                write_factor(&mut body, 'd', m.d);
                (body, c.clone())
            }),
        )
    }
}

impl FromStr for BracketPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolyParser { src: s.as_bytes(), pos: 0 }.parse()
    }
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse { column: self.pos + 1, message: message.into() })
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

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<u32, PolyError> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        if self.peek() == Some(b'-') {
            return self.err("negative exponents are not allowed");
        }
        let e = self.integer()?;
        match u32::try_from(e) {
            Ok(e) => Ok(e),
            Err(_) => self.err("exponent too large"),
        }
    }

    fn term(&mut self) -> Result<(BigInt, Monomial), PolyError> {
        let mut coeff = BigInt::one();
        let mut mono = Monomial::ONE;
        let mut any = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.integer()?;
            any = true;
        }
        loop {
            let mut star = false;
            if any && self.peek() == Some(b'*') {
                self.pos += 1;
                star = true;
            }
            match self.peek() {
                Some(b'A') => {
                    self.pos += 1;
                    mono.a += self.exponent()?;
                }
                Some(b'B') => {
                    self.pos += 1;
                    mono.b += self.exponent()?;
                }
                Some(b'd') => {
                    self.pos += 1;
                    mono.d += self.exponent()?;
                }
                Some(c) if star && c.is_ascii_digit() => {
                    coeff *= self.integer()?;
                }
                _ if star => return self.err("expected a factor after '*'"),
                _ => break,
            }
            any = true;
        }
        if !any {
            return self.err("expected a term");
        }
        Ok((coeff, mono))
    }

    fn parse(mut self) -> Result<BracketPoly, PolyError> {
        let mut out = BracketPoly::zero();
        let mut sign = BigInt::one();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -sign;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty polynomial"),
            _ => {}
        }
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, &(c * &sign));
            match self.peek() {
                None => break,
                Some(b'+') => sign = BigInt::one(),
                Some(b'-') => sign = -BigInt::one(),
                Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            }
            self.pos += 1;
        }
        Ok(out)
    }
}

macro_rules! forward_binop {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                (&self).$m(rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                self.$m(&rhs)
            }
        }
    };
}

impl Add for &BracketPoly {
    type Output = BracketPoly;
    fn add(self, rhs: &BracketPoly) -> BracketPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &BracketPoly {
    type Output = BracketPoly;
    fn sub(self, rhs: &BracketPoly) -> BracketPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &BracketPoly {
    type Output = BracketPoly;
    fn mul(self, rhs: &BracketPoly) -> BracketPoly {
        let mut out = BracketPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(*m2), &(c1 * c2));
            }
        }
        out
    }
}

impl AddAssign<&BracketPoly> for BracketPoly {
    fn add_assign(&mut self, rhs: &BracketPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c);
        }
    }
}

impl SubAssign<&BracketPoly> for BracketPoly {
    fn sub_assign(&mut self, rhs: &BracketPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, &-c);
        }
    }
}

impl AddAssign for BracketPoly {
    fn add_assign(&mut self, rhs: BracketPoly) {
        *self += &rhs;
    }
}

impl SubAssign for BracketPoly {
    fn sub_assign(&mut self, rhs: BracketPoly) {
        *self -= &rhs;
    }
}

impl Neg for &BracketPoly {
    type Output = BracketPoly;
    fn neg(self) -> BracketPoly {
        BracketPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for BracketPoly {
    type Output = BracketPoly;
    fn neg(self) -> BracketPoly {
        -&self
    }
}

forward_binop!(BracketPoly, Add, add);
forward_binop!(BracketPoly, Sub, sub);
forward_binop!(BracketPoly, Mul, mul);

impl std::iter::Sum for BracketPoly {
    fn sum<I: Iterator<Item = BracketPoly>>(iter: I) -> Self {
        iter.fold(BracketPoly::zero(), |mut acc, p| {
            acc += &p;
            acc
        })
    }
}

/// A Laurent polynomial in `A` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentA {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentA {
    pub fn zero() -> Self {
        LaurentA::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut out = LaurentA::zero();
        out.add_term(e, &c.into());
        out
    }

    /// `-A^-2 - A^2`, the value of a closed loop.
    pub fn loop_value() -> Self {
        let mut out = Self::monomial(-1, -2);
        out.add_term(2, &BigInt::from(-1));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending order of the exponent of `A`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn shift(&self, e: i64) -> Self {
        LaurentA { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    /// Renders with `A = t^(-1/4)`: each `A^e` becomes `t^(-e/4)`, terms by ascending power of t.
    pub fn render_t(&self) -> String {
        let mut s = String::new();
        let terms = self.terms.iter().rev().map(|(e, c)| (t_power(-e), c.clone()));
        let _ = write_signed_terms(&mut s, terms);
        s
    }
}

/// `t` raised to `num/4`, reduced.
fn t_power(quarter: i64) -> String {
    if quarter == 0 {
        return String::new();
    }
    let g = gcd(quarter.unsigned_abs(), 4) as i64;
    let (p, q) = (quarter / g, 4 / g);
    match (p, q) {
        (1, 1) => "t".to_string(),
        (p, 1) if p > 0 => format!("t^{p}"),
        (p, 1) => format!("t^{{{p}}}"),
        (p, q) => format!("t^{{{p}/{q}}}"),
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Debug for LaurentA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Terms by descending power of `A`, e.g. `-A^2 - A^-2`.
impl fmt::Display for LaurentA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(
            f,
            self.terms.iter().rev().map(|(e, c)| {
                let body = match *e {
                    0 => String::new(),
                    1 => "A".to_string(),
                    e => format!("A^{e}"),
                };
                (body, c.clone())
            }),
        )
    }
}

impl Add for &LaurentA {
    type Output = LaurentA;
    fn add(self, rhs: &LaurentA) -> LaurentA {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub for &LaurentA {
    type Output = LaurentA;
    fn sub(self, rhs: &LaurentA) -> LaurentA {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl Mul for &LaurentA {
    type Output = LaurentA;
    fn mul(self, rhs: &LaurentA) -> LaurentA {
        let mut out = LaurentA::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentA {
    type Output = LaurentA;
    fn neg(self) -> LaurentA {
        LaurentA { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

forward_binop!(LaurentA, Add, add);
forward_binop!(LaurentA, Sub, sub);
forward_binop!(LaurentA, Mul, mul);
