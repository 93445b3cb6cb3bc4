//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are interned edge identifiers. Internally terms are keyed by
//! monomials ordered on interned indices; every user-visible rendering goes
//! through the canonical graded reverse-lexicographic order on variable
//! *names*, so output never depends on interning order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num::{BigInt, BigRational, One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("substitution requires a polynomial of degree at most one")]
    NotLinear,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Default)]
struct Interner {
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

/// An interned polynomial variable (one per edge identifier).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(name: &str) -> Var {
        if let Some(&i) = interner().read().unwrap().index.get(name) {
            return Var(i);
        }
        let mut guard = interner().write().unwrap();
        if let Some(&i) = guard.index.get(name) {
            return Var(i);
        }
        let i = guard.names.len() as u32;
        let name: Arc<str> = Arc::from(name);
        guard.names.push(name.clone());
        guard.index.insert(name, i);
        Var(i)
    }

    pub fn name(&self) -> Arc<str> {
        interner().read().unwrap().names[self.0 as usize].clone()
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A monomial: sorted `(variable, exponent)` pairs, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 6]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Monomial {
        let mut s = SmallVec::new();
        s.push((v, 1));
        Monomial(s)
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (Var, u32)>>(pairs: I) -> Monomial {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|&(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Replaces the exponent of `v` (removing it when zero).
    fn with_exponent(&self, v: Var, e: u32) -> Monomial {
        let mut out: SmallVec<[(Var, u32); 6]> = self.0.iter().copied().filter(|&(w, _)| w != v).collect();
        if e > 0 {
            let pos = out.partition_point(|&(w, _)| w < v);
            out.insert(pos, (v, e));
        }
        Monomial(out)
    }

    fn named(&self) -> Vec<(Arc<str>, u32)> {
        let mut v: Vec<_> = self.0.iter().map(|&(x, e)| (x.name(), e)).collect();
        v.sort();
        v
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_monomial(&self.named()))
    }
}

fn render_monomial(named: &[(Arc<str>, u32)]) -> String {
    named
        .iter()
        .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Graded reverse-lexicographic comparison on name-sorted exponent vectors.
/// Variables rank by name, so the lexicographically first name is the
/// largest variable (`a + b + c`). `Greater` means `a` precedes `b` in
/// canonical output.
fn grevlex_named(a: &[(Arc<str>, u32)], b: &[(Arc<str>, u32)]) -> Ordering {
    let da: u32 = a.iter().map(|t| t.1).sum();
    let db: u32 = b.iter().map(|t| t.1).sum();
    if da != db {
        return da.cmp(&db);
    }
    // walk upwards from the smallest variable, i.e. the last name
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 || j > 0 {
        let (ea, eb) = match (i.checked_sub(1).map(|k| &a[k]), j.checked_sub(1).map(|k| &b[k])) {
            (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                Ordering::Equal => {
                    i -= 1;
                    j -= 1;
                    (x.1, y.1)
                }
                Ordering::Greater => {
                    i -= 1;
                    (x.1, 0)
                }
                Ordering::Less => {
                    j -= 1;
                    (0, y.1)
                }
            },
            (Some(x), None) => {
                i -= 1;
                (x.1, 0)
            }
            (None, Some(y)) => {
                j -= 1;
                (0, y.1)
            }
            (None, None) => unreachable!(),
        };
        if ea != eb {
            return eb.cmp(&ea);
        }
    }
    Ordering::Equal
}

/// Canonical comparison of two monomials (see [`Polynomial`]'s `Display`).
pub fn canonical_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    grevlex_named(&a.named(), &b.named())
}

/// Substitution modes for [`Polynomial::substitute`].
#[derive(Clone, Debug)]
pub enum Substitution {
    Zero,
    One,
    /// A polynomial of degree at most one.
    Linear(Polynomial),
}

/// Sparse polynomial over the rationals. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::term(c, Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn var(name: &str) -> Polynomial {
        Polynomial::from_var(Var::new(name))
    }

    pub fn from_var(v: Var) -> Polynomial {
        Polynomial::term(Rational::one(), Monomial::var(v))
    }

    /// Sum of the named variables.
    pub fn sum_of_vars<S: AsRef<str>>(names: &[S]) -> Polynomial {
        let mut terms = BTreeMap::new();
        for n in names {
            let m = Monomial::var(Var::new(n.as_ref()));
            let c: &mut Rational = terms.entry(m).or_insert_with(Rational::zero);
            *c += Rational::one();
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
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

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v)).collect()
    }

    /// Variable names sorted lexicographically.
    pub fn var_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.vars().into_iter().map(|v| v.name().to_string()).collect();
        v.sort();
        v
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(n, k)| (n.mul(m), k.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        (0..k).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    pub fn partial(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                out.add_term(m.with_exponent(v, e - 1), c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Partial derivative with respect to a named variable.
    pub fn partial_by(&self, name: &str) -> Polynomial {
        self.partial(Var::new(name))
    }

    /// Replaces `v` by the polynomial `value`.
    pub fn substitute_poly(&self, v: Var, value: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * value;
                powers.push(next);
            }
            let rest = m.with_exponent(v, 0);
            for (n, k) in &powers[e].terms {
                out.add_term(n.mul(&rest), k * c);
            }
        }
        out
    }

    pub fn substitute(&self, v: Var, kind: &Substitution) -> Result<Polynomial, PolyError> {
        match kind {
            Substitution::Zero => Ok(self.substitute_zero(v)),
            Substitution::One => Ok(self.substitute_poly(v, &Polynomial::one())),
            Substitution::Linear(l) => {
                if l.degree().unwrap_or(0) > 1 {
                    return Err(PolyError::NotLinear);
                }
                Ok(self.substitute_poly(v, l))
            }
        }
    }

    pub fn substitute_zero(&self, v: Var) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exchanges the variables `u` and `v`.
    pub fn swap_vars(&self, u: Var, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (eu, ev) = (m.exponent(u), m.exponent(v));
            out.add_term(m.with_exponent(u, ev).with_exponent(v, eu), c.clone());
        }
        out
    }

    /// Renames variables; variables absent from `map` are kept.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            (Monomial::from_pairs(m.iter().map(|(v, e)| (*map.get(&v).unwrap_or(&v), e))), c.clone())
        }))
    }

    pub fn sum_of_coefficients(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn evaluate(&self, values: &HashMap<Var, Rational>) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                let x = values.get(&v).cloned().unwrap_or_else(Rational::zero);
                t *= num::pow(x, e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Graded decomposition: degree -> homogeneous component.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree()).or_default().terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// The zero polynomial counts as homogeneous of every degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let components = self.homogeneous_components();
        let is_homogeneous = components.len() <= 1;
        let degree = if is_homogeneous { components.keys().next().copied() } else { None };
        Homogeneity { is_homogeneous, degree, components }
    }

    /// Checks `m * p == sum_v v * dp/dv` for homogeneous `p` of degree `m`.
    pub fn euler_identity_check(&self) -> Result<bool, PolyError> {
        if !self.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        let m = self.degree().unwrap_or(0);
        let mut rhs = Polynomial::zero();
        for v in self.vars() {
            rhs = &rhs + &(&Polynomial::from_var(v) * &self.partial(v));
        }
        Ok(self.scale(&Rational::from_integer(BigInt::from(m))) == rhs)
    }

    fn canonical_terms(&self) -> Vec<(Vec<(Arc<str>, u32)>, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.named(), c)).collect();
        v.sort_by(|a, b| grevlex_named(&b.0, &a.0));
        v
    }
}

/// Result of [`Polynomial::homogeneity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homogeneity {
    pub is_homogeneous: bool,
    pub degree: Option<u32>,
    pub components: BTreeMap<u32, Polynomial>,
}

fn render_coefficient(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (named, c)) in self.canonical_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = render_monomial(&named);
            if mono.is_empty() {
                write!(f, "{}", render_coefficient(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", render_coefficient(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let (small, large) = if self.len() <= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(small.len() * large.len());
        for (m, c) in &small.terms {
            for (n, k) in &large.terms {
                *acc.entry(m.mul(n)).or_insert_with(Rational::zero) += c * k;
            }
        }
        Polynomial { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                self.$f(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |a, b| &a + &b)
    }
}

/// Parses the canonical rendering (`1/2*y*z - x^2 + 3`). Identifiers may
/// contain letters, digits, `_`, `.` and `'`, and must not start with a digit.
impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Polynomial, PolyError> {
        Parser { src: s.as_bytes(), pos: 0 }.polynomial()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos, msg: msg.to_string() })
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

    fn polynomial(&mut self) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        let mut sign = Rational::one();
        if self.peek() == Some(b'-') {
            sign = -sign;
            self.pos += 1;
        }
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, c * &sign);
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => sign = Rational::one(),
                Some(b'-') => sign = -Rational::one(),
                Some(_) => return self.err("expected '+' or '-'"),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Rational, Monomial), PolyError> {
        let mut coeff = Rational::one();
        let mut pairs = Vec::new();
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_digit() => coeff *= self.number()?,
                Some(b) if is_ident_start(b) => pairs.push(self.power()?),
                _ => return self.err("expected a number or identifier"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((coeff, Monomial::from_pairs(pairs)));
            }
        }
    }

    fn digits(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn number(&mut self) -> Result<Rational, PolyError> {
        let num = self.digits()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let den = self.digits()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn power(&mut self) -> Result<(Var, u32), PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && is_ident_char(self.src[self.pos]) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v = Var::new(name);
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits()?;
            return match u32::try_from(e) {
                Ok(e) => Ok((v, e)),
                Err(_) => self.err("exponent out of range"),
            };
        }
        Ok((v, 1))
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'\''
}
