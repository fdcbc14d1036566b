//! Exact multilinear pseudo-Boolean polynomials.
//!
//! A [`Polynomial`] maps sets of binary variables to rational coefficients.
//! Every product is reduced with `x^k = x`, so a term key never repeats a
//! variable, and zero coefficients are never stored. Two polynomials are
//! equal exactly when their term maps are equal.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact coefficient type used throughout the pipeline.
pub type Coeff = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolynomialError {
    #[error("assignment has no value for variable `{0}`")]
    MissingVariable(Var),
    #[error("invalid coefficient `{0}`: expected an integer, `a/b`, or a decimal literal")]
    BadCoefficient(String),
}

/// Parses `"7"`, `"-5/2"` or `"-2.25"` into an exact rational.
pub fn parse_coeff(text: &str) -> Result<Coeff, PolynomialError> {
    let bad = || PolynomialError::BadCoefficient(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Coeff::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: i128 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let scale = 10i128.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
        let frac: i128 = frac_part.parse().map_err(|_| bad())?;
        let magnitude = whole
            .checked_mul(scale)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(bad)?;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Coeff::new(num, scale));
    }
    s.parse::<i128>().map(Coeff::from_integer).map_err(|_| bad())
}

/// Renders a coefficient as `a` or `a/b`; the inverse of [`parse_coeff`].
pub fn format_coeff(c: &Coeff) -> String {
    c.to_string()
}

/// Serde adapter writing a [`Coeff`] as its `a` / `a/b` string.
pub mod coeff_str {
    use super::{format_coeff, parse_coeff, Coeff};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Coeff, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_coeff(c))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Coeff, D::Error> {
        let text = String::deserialize(d)?;
        parse_coeff(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Coeff>`.
pub mod coeff_vec {
    use super::{format_coeff, parse_coeff, Coeff};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Coeff], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_coeff).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Coeff>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_coeff(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Least common multiple of all coefficient denominators.
pub(crate) fn common_denominator<'a>(coeffs: impl IntoIterator<Item = &'a Coeff>) -> i128 {
    coeffs.into_iter().fold(1i128, |acc, c| acc.lcm(c.denom()))
}

pub(crate) fn coeff_to_f64(c: &Coeff) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

/// A binary variable identifier.
///
/// Ordering is "natural": digit runs compare numerically, so `x2 < x10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(Arc::from(s))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut ra, mut rb) = (a, b);
    loop {
        match (ra.is_empty(), rb.is_empty()) {
            (true, true) => return a.cmp(b),
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let da = ra.as_bytes()[0].is_ascii_digit();
        let db = rb.as_bytes()[0].is_ascii_digit();
        let split = |s: &str, digits: bool| {
            s.find(|c: char| c.is_ascii_digit() != digits).unwrap_or(s.len())
        };
        let (ca, rest_a) = ra.split_at(split(ra, da));
        let (cb, rest_b) = rb.split_at(split(rb, db));
        let ord = if da && db {
            let ta = ca.trim_start_matches('0');
            let tb = cb.trim_start_matches('0');
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
        } else {
            ca.cmp(cb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
        ra = rest_a;
        rb = rest_b;
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Var::from)
    }
}

/// A set of distinct variables, stored sorted. The empty monomial is the
/// constant `1`.
///
/// Monomials order by degree first, then element-wise.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Monomial(Vec<Var>);

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Monomial::new(Vec::<Var>::deserialize(d)?))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new<I, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Var>,
    {
        let mut v: Vec<Var> = vars.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        Monomial(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn union(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|x| *x != v).cloned().collect())
    }

    /// Product value under a 0/1 assignment.
    pub fn evaluate(&self, x: &Assignment) -> Result<bool, PolynomialError> {
        let mut all = true;
        for v in &self.0 {
            all &= x.get(v).ok_or_else(|| PolynomialError::MissingVariable(v.clone()))?;
        }
        Ok(all)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A 0/1 value for each variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<Var, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pairs `vars[i]` with `bits[i]`.
    pub fn from_bits(vars: &[Var], bits: &[bool]) -> Self {
        vars.iter().cloned().zip(bits.iter().copied()).collect()
    }

    pub fn set(&mut self, v: impl Into<Var>, value: bool) {
        self.0.insert(v.into(), value);
    }

    pub fn get(&self, v: &Var) -> Option<bool> {
        self.0.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, bool)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Var, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (Var, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// Multilinear polynomial `sum_S a_S prod_{j in S} x_j` with exact
/// rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Coeff>) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c.into());
        p
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Self::term([v.into()], 1)
    }

    /// `coef * prod(vars)`.
    pub fn term<I, V>(vars: I, coef: impl Into<Coeff>) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Var>,
    {
        let mut p = Self::zero();
        p.add_term(Monomial::new(vars), coef.into());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `coef * m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, coef: Coeff) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
        }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    /// `a_∅`.
    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest term size; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().iter().cloned()).collect()
    }

    pub fn scale(&self, k: Coeff) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), *c * k)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::constant(1);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces `var` by `replacement` in every term that contains it.
    pub fn substitute(&self, var: &Var, replacement: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.contains(var) {
                let rest = m.without(var);
                for (rm, rc) in &replacement.terms {
                    out.add_term(rest.union(rm), *c * *rc);
                }
            } else {
                out.add_term(m.clone(), *c);
            }
        }
        out
    }

    /// Fixes `var` to a constant bit.
    pub fn fix(&self, var: &Var, value: bool) -> Polynomial {
        self.substitute(var, &Polynomial::constant(i128::from(value)))
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<Coeff, PolynomialError> {
        let mut total = Coeff::zero();
        for (m, c) in &self.terms {
            if m.evaluate(x)? {
                total += *c;
            }
        }
        Ok(total)
    }

    /// `a_∅ + sum_{S≠∅} min(0, a_S)`.
    pub fn lower_bound(&self) -> Coeff {
        self.bound(|c| c.is_negative())
    }

    /// `a_∅ + sum_{S≠∅} max(0, a_S)`.
    pub fn upper_bound(&self) -> Coeff {
        self.bound(|c| c.is_positive())
    }

    fn bound(&self, keep: impl Fn(&Coeff) -> bool) -> Coeff {
        self.terms
            .iter()
            .filter(|(m, c)| m.is_constant() || keep(c))
            .map(|(_, c)| *c)
            .sum()
    }

    /// Sum of `|a_S|` over non-constant terms.
    pub fn abs_coefficient_sum(&self) -> Coeff {
        self.terms
            .iter()
            .filter(|(m, _)| !m.is_constant())
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -*c) } else { ("+", *c) };
            match (i, sign) {
                (0, "-") => f.write_str("-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if m.is_constant() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

fn add_into(acc: &mut Polynomial, other: &Polynomial, sign: Coeff) {
    for (m, c) in &other.terms {
        acc.add_term(m.clone(), *c * sign);
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        add_into(&mut out, rhs, Coeff::one());
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        add_into(&mut self, &rhs, Coeff::one());
        self
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        add_into(self, rhs, Coeff::one());
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        add_into(&mut out, rhs, -Coeff::one());
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        add_into(&mut self, &rhs, -Coeff::one());
        self
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-Coeff::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.union(mb), *ca * *cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Mul<Coeff> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, k: Coeff) -> Polynomial {
        self.scale(k)
    }
}

impl Mul<Coeff> for Polynomial {
    type Output = Polynomial;
    fn mul(self, k: Coeff) -> Polynomial {
        self.scale(k)
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |acc, p| acc + p)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    vars: Vec<Var>,
    coef: String,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(m, c)| TermRecord {
                vars: m.vars().to_vec(),
                coef: format_coeff(c),
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let mut p = Polynomial::zero();
        for r in records {
            let c = parse_coeff(&r.coef).map_err(serde::de::Error::custom)?;
            p.add_term(Monomial::new(r.vars), c);
        }
        Ok(p)
    }
}

/// Integer polynomial over problem-level (integer or Boolean) variables,
/// before binarization. Exponents matter here: `z^3` is not `z`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntegerPolynomial {
    /// Exponent map (variable name → exponent ≥ 1) to coefficient.
    terms: BTreeMap<BTreeMap<String, u32>, i128>,
}

impl IntegerPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coef * prod name^exp`. Zero exponents are dropped.
    pub fn add_term<I, S>(&mut self, factors: I, coef: i128)
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut key = BTreeMap::new();
        for (name, exp) in factors {
            if exp > 0 {
                *key.entry(name.into()).or_insert(0) += exp;
            }
        }
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += coef;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn with_term<I, S>(mut self, factors: I, coef: i128) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        self.add_term(factors, coef);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BTreeMap<String, u32>, i128)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `max |w|`.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|w| w.values().sum()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.terms.keys().flat_map(|w| w.keys().map(String::as_str)).collect()
    }

    pub fn evaluate(&self, values: &BTreeMap<String, i128>) -> Option<i128> {
        let mut total = 0i128;
        for (w, c) in &self.terms {
            let mut t = *c;
            for (name, exp) in w {
                t *= values.get(name)?.pow(*exp);
            }
            total += t;
        }
        Some(total)
    }

    /// Replaces each variable by its binary decode polynomial and reduces
    /// with `x^k = x`. `decode` returns `None` for unknown names, which is
    /// reported back as `Err(name)`.
    pub fn binarize<F>(&self, mut decode: F) -> Result<Polynomial, String>
    where
        F: FnMut(&str) -> Option<Polynomial>,
    {
        let mut cache: BTreeMap<&str, Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (w, c) in &self.terms {
            let mut t = Polynomial::constant(*c);
            for (name, exp) in w {
                if !cache.contains_key(name.as_str()) {
                    let d = decode(name).ok_or_else(|| name.clone())?;
                    cache.insert(name.as_str(), d);
                }
                t = &t * &cache[name.as_str()].pow(*exp);
            }
            out += &t;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct IntegerTermRecord {
    factors: BTreeMap<String, u32>,
    coef: i128,
}

impl Serialize for IntegerPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let records: Vec<IntegerTermRecord> = self
            .terms
            .iter()
            .map(|(w, c)| IntegerTermRecord {
                factors: w.clone(),
                coef: *c,
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<IntegerTermRecord>::deserialize(d)?;
        let mut p = IntegerPolynomial::new();
        for r in records {
            p.add_term(r.factors, r.coef);
        }
        Ok(p)
    }
}
