//! Exact scalars: multivariate polynomials with rational coefficients.
//!
//! Every matrix entry in the crate is a [`Polynomial`] over a declared, ordered
//! parameter list ([`Params`]). Storage is canonical (no zero coefficients), so
//! structural equality is mathematical equality and `is_zero` is exact.
//!
//! The textual form is graded-lex ordered by parameter declaration order, with
//! coefficients written `n` or `n/d` and monomials written `k1^2*k2`, e.g.
//! `-1/2*k1*k2 + 3`. [`Polynomial::parse`] accepts that form (and a little more:
//! parentheses, repeated factors, powers of parenthesized sums).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lex::{self, Spanned, Tok};

pub type Rational = BigRational;

/// Parameter → value map used by evaluation and specialization.
pub type Assignment = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("parameter-set mismatch: [{left}] vs [{right}]")]
    ParamMismatch { left: String, right: String },
    #[error("parameter `{0}` has no assigned value")]
    Unassigned(String),
    #[error("invalid parameter name `{0}`")]
    InvalidParameter(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// Builds an exact rational from an integer pair. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n`, `n/d` or `-n/d` (no whitespace).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (n, d) = match body.split_once('/') {
        Some((n, d)) if digits(n) && digits(d) => (n, d),
        None if digits(body) => (body, "1"),
        _ => return None,
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    let r = Rational::new(n, d);
    Some(if neg { -r } else { r })
}

/// Ordered, duplicate-free list of parameter names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Params(Arc<[String]>);

impl Params {
    pub fn new<I, S>(names: I) -> Result<Self, ScalarError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !lex::is_identifier(&name) {
                return Err(ScalarError::InvalidParameter(name));
            }
            if out.contains(&name) {
                return Err(ScalarError::DuplicateParameter(name));
            }
            out.push(name);
        }
        Ok(Params(out.into()))
    }

    pub fn empty() -> Self {
        Params(Arc::from(Vec::<String>::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    fn check_same(&self, other: &Params) -> Result<(), ScalarError> {
        if Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0 {
            Ok(())
        } else {
            Err(ScalarError::ParamMismatch {
                left: self.0.join(" "),
                right: other.0.join(" "),
            })
        }
    }
}

impl fmt::Debug for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Dense exponent vector, one entry per declared parameter.
///
/// Ordered graded-lexicographically: total degree first, then exponents
/// compared in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    fn one(n: usize) -> Self {
        Monomial(vec![0; n].into_boxed_slice())
    }

    fn var(n: usize, idx: usize, exp: u32) -> Self {
        let mut v = vec![0; n];
        v[idx] = exp;
        Monomial(v.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in canonical form: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    params: Params,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(params: &Params) -> Self {
        Polynomial {
            params: params.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(params: &Params) -> Self {
        Self::constant(params, Rational::one())
    }

    pub fn constant(params: &Params, value: Rational) -> Self {
        let mut p = Self::zero(params);
        if !value.is_zero() {
            p.terms.insert(Monomial::one(params.len()), value);
        }
        p
    }

    pub fn from_int(params: &Params, n: i64) -> Self {
        Self::constant(params, int(n))
    }

    /// The polynomial consisting of the single parameter `name`.
    pub fn var(params: &Params, name: &str) -> Result<Self, ScalarError> {
        let idx = params
            .index_of(name)
            .ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        let mut p = Self::zero(params);
        p.terms.insert(Monomial::var(params.len(), idx, 1), Rational::one());
        Ok(p)
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates and
    /// dropping zeros. Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(params: &Params, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(params);
        for (exps, c) in terms {
            assert_eq!(exps.len(), params.len(), "exponent vector length");
            p.add_term(Monomial(exps.into_boxed_slice()), c);
        }
        p
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial has no parameter dependence (zero gives `Some(0)`).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Names of the parameters that actually occur.
    pub fn support(&self) -> Vec<&str> {
        (0..self.params.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .map(|i| self.params.0[i].as_str())
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        let mut out = self.clone();
        out.try_add_assign(other)?;
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        self.checked_add(&other.neg())
    }

    pub fn try_add_assign(&mut self, other: &Polynomial) -> Result<(), ScalarError> {
        self.params.check_same(&other.params)?;
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, ScalarError> {
        self.params.check_same(&other.params)?;
        let mut out = Polynomial::zero(&self.params);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero(&self.params);
        }
        Polynomial {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Exact evaluation. Only parameters that occur need to be assigned.
    pub fn eval(&self, assignment: &Assignment) -> Result<Rational, ScalarError> {
        let mut values = Vec::with_capacity(self.params.len());
        for (i, name) in self.params.0.iter().enumerate() {
            let used = self.terms.keys().any(|m| m.0[i] > 0);
            match assignment.get(name) {
                Some(v) => values.push(v.clone()),
                None if !used => values.push(Rational::zero()),
                None => return Err(ScalarError::Unassigned(name.clone())),
            }
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(m.0.iter()) {
                if e > 0 {
                    t *= num_traits::pow::Pow::pow(v, e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluates and re-wraps the value as a constant over the same parameter list.
    pub fn specialize(&self, assignment: &Assignment) -> Result<Polynomial, ScalarError> {
        Ok(Polynomial::constant(&self.params, self.eval(assignment)?))
    }

    /// Same terms over a different parameter list, matching names. Fails if a
    /// parameter that occurs is missing from `target`.
    pub fn reindex(&self, target: &Params) -> Result<Polynomial, ScalarError> {
        let mut map = Vec::with_capacity(self.params.len());
        for (i, name) in self.params.0.iter().enumerate() {
            let used = self.terms.keys().any(|m| m.0[i] > 0);
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if !used => map.push(None),
                None => return Err(ScalarError::UnknownParameter(name.clone())),
            }
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    exps[j] = e;
                }
            }
            out.add_term(Monomial(exps.into_boxed_slice()), c.clone());
        }
        Ok(out)
    }

    /// Parses the textual form against a fixed parameter list.
    pub fn parse(params: &Params, text: &str) -> Result<Polynomial, ScalarError> {
        let toks = lex::tokenize(text).map_err(|e| ScalarError::Parse {
            offset: e.offset,
            message: format!("unexpected character `{}`", e.found),
        })?;
        let mut p = PolyParser::new(&toks, params, text.len());
        let poly = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(p.error_at(t.offset, format!("unexpected {}", t.tok.describe())));
        }
        Ok(poly)
    }

    /// Renders the monomial part of a term, e.g. `k1^2*k2`. Empty for the unit monomial.
    fn monomial_text(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (name, &e) in self.params.0.iter().zip(m.0.iter()) {
            match e {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mono = self.monomial_text(m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics on parameter-set mismatch; use the `checked_*` form otherwise.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

impl std::ops::Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(&self)
    }
}

const MAX_DEPTH: usize = 64;
const MAX_EXPONENT: u32 = 1000;
const MAX_DEGREE: u64 = 1000;
const MAX_TERMS: usize = 10_000;

/// Recursive-descent parser over a token slice.
///
/// ```text
/// expr   := ['+'|'-'] term (('+'|'-') term)*
/// term   := factor ('*' factor)*
/// factor := atom ('^' digits)?
/// atom   := digits ['/' digits] | param | '(' expr ')'
/// ```
pub(crate) struct PolyParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    params: &'a Params,
    depth: usize,
    end: usize,
}

impl<'a> PolyParser<'a> {
    pub(crate) fn new(toks: &'a [Spanned], params: &'a Params, end: usize) -> Self {
        PolyParser {
            toks,
            pos: 0,
            params,
            depth: 0,
            end,
        }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> Option<&'a Spanned> {
        self.toks.get(self.pos + ahead)
    }

    pub(crate) fn bump(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn offset(&self) -> usize {
        self.peek().map(|t| t.offset).unwrap_or(self.end)
    }

    pub(crate) fn error_at(&self, offset: usize, message: impl Into<String>) -> ScalarError {
        ScalarError::Parse {
            offset,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ScalarError> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_at(
                t.offset,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            )),
            None => Err(self.error_at(self.end, format!("expected {}, found end of input", tok.describe()))),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Polynomial, ScalarError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error_at(self.offset(), "expression nested too deeply"));
        }
        let mut acc = Polynomial::zero(self.params);
        let mut negate = match self.peek().map(|t| &t.tok) {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            let t = if negate { t.neg() } else { t };
            acc.try_add_assign(&t)?;
            if acc.len() > MAX_TERMS {
                return Err(self.error_at(self.offset(), "polynomial too large"));
            }
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => break,
            }
            self.pos += 1;
        }
        self.depth -= 1;
        Ok(acc)
    }

    pub(crate) fn term(&mut self) -> Result<Polynomial, ScalarError> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Star)) {
            self.pos += 1;
            let f = self.factor()?;
            acc = self.bounded_mul(&acc, &f)?;
        }
        Ok(acc)
    }

    fn bounded_mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, ScalarError> {
        if a.degree() + b.degree() > MAX_DEGREE || a.len().saturating_mul(b.len()) > MAX_TERMS * 10 {
            return Err(self.error_at(self.offset(), "polynomial too large"));
        }
        a.checked_mul(b)
    }

    pub(crate) fn exponent(&mut self) -> Result<Option<u32>, ScalarError> {
        if !matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
            return Ok(None);
        }
        self.pos += 1;
        match self.bump() {
            Some(Spanned {
                tok: Tok::Num(n),
                offset,
            }) => match u32::try_from(n) {
                Ok(e) if e <= MAX_EXPONENT => Ok(Some(e)),
                _ => Err(self.error_at(*offset, format!("exponent above {MAX_EXPONENT}"))),
            },
            Some(t) => Err(self.error_at(t.offset, format!("expected exponent, found {}", t.tok.describe()))),
            None => Err(self.error_at(self.end, "expected exponent, found end of input")),
        }
    }

    pub(crate) fn factor(&mut self) -> Result<Polynomial, ScalarError> {
        let start = self.offset();
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let idx = self
                    .params
                    .index_of(name)
                    .ok_or_else(|| self.error_at(start, format!("unknown parameter `{name}`")))?;
                let e = self.exponent()?.unwrap_or(1);
                if u64::from(e) > MAX_DEGREE {
                    return Err(self.error_at(start, "polynomial too large"));
                }
                let mut p = Polynomial::zero(self.params);
                p.add_term(Monomial::var(self.params.len(), idx, e), Rational::one());
                Ok(p)
            }
            _ => {
                let base = self.atom()?;
                match self.exponent()? {
                    None => Ok(base),
                    Some(e) => {
                        let mut acc = Polynomial::one(self.params);
                        for _ in 0..e {
                            acc = self.bounded_mul(&acc, &base)?;
                        }
                        Ok(acc)
                    }
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ScalarError> {
        match self.bump() {
            Some(Spanned { tok: Tok::Num(n), .. }) => {
                let value = if matches!(self.peek().map(|t| &t.tok), Some(Tok::Slash)) {
                    self.pos += 1;
                    match self.bump() {
                        Some(Spanned {
                            tok: Tok::Num(d),
                            offset,
                        }) => {
                            if d.is_zero() {
                                return Err(self.error_at(*offset, "zero denominator"));
                            }
                            Rational::new(n.clone(), d.clone())
                        }
                        Some(t) => {
                            return Err(
                                self.error_at(t.offset, format!("expected denominator, found {}", t.tok.describe()))
                            )
                        }
                        None => return Err(self.error_at(self.end, "expected denominator, found end of input")),
                    }
                } else {
                    Rational::from_integer(n.clone())
                };
                Ok(Polynomial::constant(self.params, value))
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(self.error_at(t.offset, format!("unexpected {}", t.tok.describe()))),
            None => Err(self.error_at(self.end, "unexpected end of input")),
        }
    }
}
