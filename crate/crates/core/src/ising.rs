//! QUBO and Ising models, and the spin-space form of arbitrary-degree
//! polynomials used to build QAOA phase circuits.
//!
//! Spins and bits are related by `x = (1 - s) / 2`, i.e. bit 0 is spin +1.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::polynomial::{coeff_to_f64, format_coeff, parse_coeff, Assignment, Coeff, Monomial, Polynomial, Var};

/// Dense matrices are written for models up to this many variables; larger
/// ones use a sparse entry list.
pub const DENSE_JSON_LIMIT: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsingError {
    #[error("polynomial has degree {0}; QUBO form needs degree at most 2")]
    NotQuadratic(usize),
    #[error("variable {0} is missing from the given order")]
    MissingVariable(Var),
    #[error("variable {0} appears twice in the order")]
    DuplicateVariable(Var),
    #[error("Q is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("matrix shape does not match {0} variables")]
    Shape(usize),
    #[error("J has nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),
}

fn check_order(order: &[Var], needed: impl IntoIterator<Item = Var>) -> Result<BTreeMap<Var, usize>, IsingError> {
    let mut index = BTreeMap::new();
    for (i, v) in order.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            return Err(IsingError::DuplicateVariable(v.clone()));
        }
    }
    for v in needed {
        if !index.contains_key(&v) {
            return Err(IsingError::MissingVariable(v));
        }
    }
    Ok(index)
}

fn square(n: usize) -> Vec<Vec<Coeff>> {
    vec![vec![Coeff::zero(); n]; n]
}

/// `f(x) = sum_{j,k} Q_jk x_j x_k + c` with `Q` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuboModel {
    pub variables: Vec<Var>,
    pub q: Vec<Vec<Coeff>>,
    pub constant: Coeff,
}

impl QuboModel {
    pub fn new(variables: Vec<Var>, q: Vec<Vec<Coeff>>, constant: Coeff) -> Result<Self, IsingError> {
        let n = variables.len();
        if q.len() != n || q.iter().any(|row| row.len() != n) {
            return Err(IsingError::Shape(n));
        }
        check_order(&variables, [])?;
        for j in 0..n {
            for k in j + 1..n {
                if q[j][k] != q[k][j] {
                    return Err(IsingError::Asymmetric(j, k));
                }
            }
        }
        Ok(QuboModel { variables, q, constant })
    }

    /// Variables in natural order.
    pub fn from_polynomial(f: &Polynomial) -> Result<Self, IsingError> {
        let order: Vec<Var> = f.variables().into_iter().collect();
        Self::from_polynomial_with_order(f, &order)
    }

    /// `order` may contain variables absent from `f`; they get zero rows.
    pub fn from_polynomial_with_order(f: &Polynomial, order: &[Var]) -> Result<Self, IsingError> {
        if f.degree() > 2 {
            return Err(IsingError::NotQuadratic(f.degree()));
        }
        let index = check_order(order, f.variables())?;
        let mut q = square(order.len());
        let mut constant = Coeff::zero();
        let half = Coeff::new(1, 2);
        for (m, c) in f.terms() {
            match m.vars() {
                [] => constant = *c,
                [a] => {
                    let j = index[a];
                    q[j][j] = *c;
                }
                [a, b] => {
                    let (j, k) = (index[a], index[b]);
                    q[j][k] = *c * half;
                    q[k][j] = *c * half;
                }
                _ => unreachable!(),
            }
        }
        Ok(QuboModel { variables: order.to_vec(), q, constant })
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::constant(self.constant);
        for (j, row) in self.q.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    p.add_term(Monomial::new([self.variables[j].clone(), self.variables[k].clone()]), *c);
                }
            }
        }
        p
    }

    pub fn evaluate(&self, x: &[bool]) -> Coeff {
        let mut acc = self.constant;
        for (j, row) in self.q.iter().enumerate() {
            if !x[j] {
                continue;
            }
            for (k, c) in row.iter().enumerate() {
                if x[k] {
                    acc += c;
                }
            }
        }
        acc
    }
}

/// `f(s) = sum_{j != k} J_jk s_j s_k + sum_j h_j s_j + offset`.
///
/// `J` is symmetric with zero diagonal, so each coupling appears twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingModel {
    pub variables: Vec<Var>,
    pub j: Vec<Vec<Coeff>>,
    pub h: Vec<Coeff>,
    pub offset: Coeff,
}

impl IsingModel {
    pub fn new(variables: Vec<Var>, j: Vec<Vec<Coeff>>, h: Vec<Coeff>, offset: Coeff) -> Result<Self, IsingError> {
        let n = variables.len();
        if j.len() != n || h.len() != n || j.iter().any(|row| row.len() != n) {
            return Err(IsingError::Shape(n));
        }
        check_order(&variables, [])?;
        for a in 0..n {
            if !j[a][a].is_zero() {
                return Err(IsingError::NonZeroDiagonal(a));
            }
            for b in a + 1..n {
                if j[a][b] != j[b][a] {
                    return Err(IsingError::Asymmetric(a, b));
                }
            }
        }
        Ok(IsingModel { variables, j, h, offset })
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Spins are ±1.
    pub fn evaluate(&self, s: &[i8]) -> Coeff {
        let mut acc = self.offset;
        for (a, row) in self.j.iter().enumerate() {
            acc += self.h[a] * Coeff::from_integer(s[a] as i128);
            for (b, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc += *c * Coeff::from_integer((s[a] * s[b]) as i128);
                }
            }
        }
        acc
    }

    pub fn evaluate_bits(&self, x: &[bool]) -> Coeff {
        let s: Vec<i8> = x.iter().map(|&b| if b { -1 } else { 1 }).collect();
        self.evaluate(&s)
    }

    pub fn to_spin_polynomial(&self) -> IsingPolynomial {
        let mut p = IsingPolynomial::default();
        p.add_term(Monomial::one(), self.offset);
        for (a, row) in self.j.iter().enumerate() {
            p.add_term(Monomial::new([self.variables[a].clone()]), self.h[a]);
            for (b, c) in row.iter().enumerate().skip(a + 1) {
                p.add_term(
                    Monomial::new([self.variables[a].clone(), self.variables[b].clone()]),
                    *c * Coeff::from_integer(2),
                );
            }
        }
        p
    }

    /// `J` with the offset stored in the first diagonal entry, the layout
    /// used when the constant is folded into `J_11` (`s_1 s_1 = 1`).
    pub fn folded_coupling_matrix(&self) -> Vec<Vec<Coeff>> {
        let mut j = self.j.clone();
        if let Some(row) = j.first_mut() {
            row[0] = self.offset;
        }
        j
    }

    /// Floating-point copy for samplers.
    pub fn to_dense(&self) -> DenseIsing {
        let n = self.num_variables();
        let mut j = vec![0.0; n * n];
        let mut neighbours = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                let v = coeff_to_f64(&self.j[a][b]);
                j[a * n + b] = v;
                if v != 0.0 {
                    neighbours[a].push((b, v));
                }
            }
        }
        DenseIsing {
            n,
            h: self.h.iter().map(coeff_to_f64).collect(),
            neighbours,
            offset: coeff_to_f64(&self.offset),
        }
    }
}

/// Ising model in `f64` with sparse neighbour lists.
#[derive(Clone, Debug)]
pub struct DenseIsing {
    pub n: usize,
    pub h: Vec<f64>,
    /// `(k, J_jk)` for every nonzero coupling of `j`.
    pub neighbours: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl DenseIsing {
    /// Energy change from flipping spin `j`.
    pub fn flip_delta(&self, s: &[i8], j: usize) -> f64 {
        let local: f64 = self.h[j] + 2.0 * self.neighbours[j].iter().map(|&(k, v)| v * s[k] as f64).sum::<f64>();
        -2.0 * s[j] as f64 * local
    }
}

/// `J_jk = Q_jk / 4`, `h_j = -1/2 sum_k Q_jk`,
/// `offset = c + 1/4 sum_jk Q_jk + 1/4 sum_j Q_jj`.
pub fn qubo_to_ising(q: &QuboModel) -> Result<IsingModel, IsingError> {
    let n = q.num_variables();
    let q = QuboModel::new(q.variables.clone(), q.q.clone(), q.constant)?;
    let quarter = Coeff::new(1, 4);
    let mut j = square(n);
    let mut h = vec![Coeff::zero(); n];
    let mut offset = q.constant;
    for a in 0..n {
        for b in 0..n {
            let v = q.q[a][b];
            if a != b {
                j[a][b] = v * quarter;
            }
            h[a] -= v / Coeff::from_integer(2);
            offset += v * quarter;
        }
        offset += q.q[a][a] * quarter;
    }
    Ok(IsingModel { variables: q.variables, j, h, offset })
}

/// Substitutes `s = 1 - 2x`.
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    let p = m.to_spin_polynomial().to_pb();
    QuboModel::from_polynomial_with_order(&p, &m.variables).expect("spin model is quadratic over its own variables")
}

/// `sum_S a_S prod_{j in S} s_j` over spins `s_j ∈ {-1, 1}`, any degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsingPolynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl IsingPolynomial {
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut p = Self::default();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Coeff::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Monomial::one())
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> std::collections::BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().iter().cloned()).collect()
    }

    /// Evaluates at spins given as an assignment of bits (`true` ↦ -1).
    pub fn evaluate(&self, x: &Assignment) -> Result<Coeff, crate::polynomial::PolynomialError> {
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut sign = 1;
            for v in m.vars() {
                match x.get(v) {
                    Some(true) => sign = -sign,
                    Some(false) => {}
                    None => return Err(crate::polynomial::PolynomialError::MissingVariable(v.clone())),
                }
            }
            acc += *c * Coeff::from_integer(sign);
        }
        Ok(acc)
    }

    /// Substitutes `s = 1 - 2x`.
    pub fn to_pb(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for_each_subset(m.vars(), |sub| {
                let k = Coeff::from_integer((-2i128).pow(sub.len() as u32));
                out.add_term(Monomial::new(sub.iter().cloned()), *c * k);
            });
        }
        out
    }

    pub fn display_with(&self, name: impl Fn(&Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let ops: Vec<String> = m.vars().iter().map(&name).collect();
            if ops.is_empty() {
                parts.push(format_coeff(c));
            } else if c.is_one() {
                parts.push(ops.join(" "));
            } else {
                parts.push(format!("{} {}", format_coeff(c), ops.join(" ")));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl std::fmt::Display for IsingPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.display_with(|v| format!("Z({v})")))
    }
}

fn for_each_subset<F: FnMut(&[Var])>(vars: &[Var], mut f: F) {
    let n = vars.len();
    let mut buf = Vec::with_capacity(n);
    for mask in 0u64..1 << n {
        buf.clear();
        buf.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| vars[i].clone()));
        f(&buf);
    }
}

/// `a_S prod x_j = a_S / 2^|S| sum_{T ⊆ S} (-1)^|T| prod_{j in T} s_j`.
pub fn ising_polynomial_from_pb(f: &Polynomial) -> IsingPolynomial {
    let mut out = IsingPolynomial::default();
    for (m, c) in f.terms() {
        let scale = *c / Coeff::from_integer(1i128 << m.degree());
        for_each_subset(m.vars(), |sub| {
            let sign = if sub.len() % 2 == 0 { 1 } else { -1 };
            out.add_term(Monomial::new(sub.iter().cloned()), scale * Coeff::from_integer(sign));
        });
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Entry {
    i: usize,
    j: usize,
    value: String,
}

fn matrix_out(m: &[Vec<Coeff>]) -> (Option<Vec<Vec<String>>>, Option<Vec<Entry>>) {
    if m.len() <= DENSE_JSON_LIMIT {
        (Some(m.iter().map(|r| r.iter().map(format_coeff).collect()).collect()), None)
    } else {
        let mut entries = Vec::new();
        for (i, r) in m.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    entries.push(Entry { i, j, value: format_coeff(c) });
                }
            }
        }
        (None, Some(entries))
    }
}

fn matrix_in<E: serde::de::Error>(n: usize, dense: Option<Vec<Vec<String>>>, sparse: Option<Vec<Entry>>) -> Result<Vec<Vec<Coeff>>, E> {
    let parse = |t: &str| parse_coeff(t).map_err(E::custom);
    match (dense, sparse) {
        (Some(rows), None) => rows.iter().map(|r| r.iter().map(|t| parse(t)).collect()).collect(),
        (None, entries) => {
            let mut m = square(n);
            for e in entries.unwrap_or_default() {
                if e.i >= n || e.j >= n {
                    return Err(E::custom(format!("entry ({}, {}) out of range", e.i, e.j)));
                }
                m[e.i][e.j] = parse(&e.value)?;
            }
            Ok(m)
        }
        (Some(_), Some(_)) => Err(E::custom("give either a dense matrix or an entry list, not both")),
    }
}

#[derive(Serialize, Deserialize)]
struct QuboWire {
    format_version: u32,
    variables: Vec<Var>,
    constant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_entries: Option<Vec<Entry>>,
}

impl Serialize for QuboModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (q, q_entries) = matrix_out(&self.q);
        QuboWire {
            format_version: crate::FORMAT_VERSION,
            variables: self.variables.clone(),
            constant: format_coeff(&self.constant),
            q,
            q_entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuboModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = QuboWire::deserialize(d)?;
        let q = matrix_in::<D::Error>(w.variables.len(), w.q, w.q_entries)?;
        let c = parse_coeff(&w.constant).map_err(D::Error::custom)?;
        QuboModel::new(w.variables, q, c).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct IsingWire {
    format_version: u32,
    variables: Vec<Var>,
    offset: String,
    h: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j_entries: Option<Vec<Entry>>,
}

impl Serialize for IsingModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (j, j_entries) = matrix_out(&self.j);
        IsingWire {
            format_version: crate::FORMAT_VERSION,
            variables: self.variables.clone(),
            offset: format_coeff(&self.offset),
            h: self.h.iter().map(format_coeff).collect(),
            j,
            j_entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsingModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = IsingWire::deserialize(d)?;
        let j = matrix_in::<D::Error>(w.variables.len(), w.j, w.j_entries)?;
        let h = w.h.iter().map(|t| parse_coeff(t).map_err(D::Error::custom)).collect::<Result<_, _>>()?;
        let offset = parse_coeff(&w.offset).map_err(D::Error::custom)?;
        IsingModel::new(w.variables, j, h, offset).map_err(D::Error::custom)
    }
}

impl Serialize for IsingPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), *c))).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsingPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = Polynomial::deserialize(d)?;
        Ok(IsingPolynomial::from_terms(p.terms().map(|(m, c)| (m.clone(), *c))))
    }
}
