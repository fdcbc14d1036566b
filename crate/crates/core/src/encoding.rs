//! Binary encodings of integer, categorical, and permutation variables, and
//! the expansion of Iverson-bracket predicates and MAX-SAT clauses into
//! pseudo-Boolean polynomials.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polynomial::{Assignment, Coeff, Polynomial, PolynomialError, Var};
use crate::registry::VariableRegistry;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("empty integer domain for `{name}`: lower bound {lower} exceeds upper bound {upper}")]
    EmptyDomain { name: String, lower: i128, upper: i128 },
    #[error("integer domain for `{0}` is too wide to binarize")]
    DomainTooWide(String),
    #[error("categorical variable `{0}` needs at least two levels")]
    TooFewLevels(String),
    #[error("categorical variable `{name}` repeats level `{level}`")]
    DuplicateLevel { name: String, level: String },
    #[error("permutation `{0}` must have size at least 1")]
    EmptyPermutation(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is not categorical")]
    NotCategorical(String),
    #[error("variable `{0}` is not a permutation")]
    NotPermutation(String),
    #[error("categorical variable `{var}` has no level `{level}`")]
    UnknownLevel { var: String, level: String },
    #[error("permutation `{perm}` of size {size} has no entry ({position}, {value})")]
    PermutationIndex { perm: String, size: usize, position: usize, value: usize },
    #[error("clause {index} contains `{var}` and its negation; it is always satisfied")]
    TautologicalClause { index: usize, var: Var },
    #[error("MAX-SAT instance has no clauses")]
    NoClauses,
}

/// `z = a + (2^{n-1} - b) x_n + sum_{j<n-1} 2^j x_{j+1}` over `n` bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerEncoding {
    pub name: String,
    pub lower: i128,
    pub upper: i128,
    pub bits: Vec<Var>,
    /// Weight of each bit in the decode sum, aligned with `bits`.
    pub weights: Vec<i128>,
}

/// Number of bits `ceil(log2(c - a + 1))` for a domain `[a, c]`.
pub fn bits_for_domain(lower: i128, upper: i128) -> u32 {
    let size = (upper - lower + 1) as u128;
    if size <= 1 {
        0
    } else {
        128 - (size - 1).leading_zeros()
    }
}

/// Encodes `name ∈ [a, c]` with bits named `{bit_prefix}1 .. {bit_prefix}n`.
pub fn encode_integer(name: &str, bit_prefix: &str, a: i128, c: i128) -> Result<IntegerEncoding, EncodingError> {
    let n = checked_bits(name, a, c)?;
    let bits = (1..=n).map(|j| Var::new(format!("{bit_prefix}{j}"))).collect();
    encode_integer_with_bits(name, a, c, bits)
}

fn checked_bits(name: &str, a: i128, c: i128) -> Result<u32, EncodingError> {
    if a > c {
        return Err(EncodingError::EmptyDomain {
            name: name.to_string(),
            lower: a,
            upper: c,
        });
    }
    match c.checked_sub(a) {
        Some(width) if width < 1i128 << 100 => Ok(bits_for_domain(a, c)),
        _ => Err(EncodingError::DomainTooWide(name.to_string())),
    }
}

/// Variant of [`encode_integer`] with caller-chosen bit names; the caller
/// must supply exactly [`bits_for_domain`] names.
pub fn encode_integer_with_bits(name: &str, a: i128, c: i128, bits: Vec<Var>) -> Result<IntegerEncoding, EncodingError> {
    let n = checked_bits(name, a, c)?;
    assert_eq!(bits.len(), n as usize, "bit name count must match domain width");
    let mut weights: Vec<i128> = (0..n.saturating_sub(1)).map(|j| 1i128 << j).collect();
    if n >= 1 {
        let b = a + (1i128 << n) - 1 - c;
        weights.push((1i128 << (n - 1)) - b);
    }
    Ok(IntegerEncoding {
        name: name.to_string(),
        lower: a,
        upper: c,
        bits,
        weights,
    })
}

impl IntegerEncoding {
    pub fn num_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn decode_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::constant(self.lower);
        for (v, w) in self.bits.iter().zip(&self.weights) {
            p += &Polynomial::term([v.clone()], *w);
        }
        p
    }

    pub fn decode(&self, x: &Assignment) -> Result<i128, PolynomialError> {
        let mut z = self.lower;
        for (v, w) in self.bits.iter().zip(&self.weights) {
            if x.get(v).ok_or_else(|| PolynomialError::MissingVariable(v.clone()))? {
                z += w;
            }
        }
        Ok(z)
    }

    /// Some bit pattern reaching `value`, found greedily from the most
    /// significant bit down.
    pub fn encode_value(&self, value: i128) -> Option<Vec<bool>> {
        if value < self.lower || value > self.upper {
            return None;
        }
        let mut rest = value - self.lower;
        let mut bits = vec![false; self.bits.len()];
        for j in (0..self.bits.len()).rev() {
            if self.weights[j] <= rest {
                bits[j] = true;
                rest -= self.weights[j];
            }
        }
        (rest == 0).then_some(bits)
    }
}

/// One indicator per level, constrained by `sum_l x_l = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneHotEncoding {
    pub name: String,
    pub levels: Vec<String>,
    pub indicators: Vec<Var>,
}

pub fn encode_categorical(name: &str, levels: &[String]) -> Result<OneHotEncoding, EncodingError> {
    if levels.len() < 2 {
        return Err(EncodingError::TooFewLevels(name.to_string()));
    }
    for (i, l) in levels.iter().enumerate() {
        if levels[..i].contains(l) {
            return Err(EncodingError::DuplicateLevel {
                name: name.to_string(),
                level: l.clone(),
            });
        }
    }
    Ok(OneHotEncoding {
        name: name.to_string(),
        levels: levels.to_vec(),
        indicators: levels.iter().map(|l| Var::new(format!("{name}={l}"))).collect(),
    })
}

impl OneHotEncoding {
    pub fn indicator(&self, level: &str) -> Option<&Var> {
        self.levels.iter().position(|l| l == level).map(|i| &self.indicators[i])
    }

    /// `sum_l x_l - 1`.
    pub fn constraint(&self) -> Polynomial {
        let mut p = Polynomial::constant(-1);
        for v in &self.indicators {
            p += &Polynomial::var(v.clone());
        }
        p
    }

    /// The selected level, or `None` when the indicators are not one-hot.
    pub fn decode(&self, x: &Assignment) -> Result<Option<String>, PolynomialError> {
        let mut hit = None;
        for (l, v) in self.levels.iter().zip(&self.indicators) {
            if x.get(v).ok_or_else(|| PolynomialError::MissingVariable(v.clone()))? {
                if hit.is_some() {
                    return Ok(None);
                }
                hit = Some(l.clone());
            }
        }
        Ok(hit)
    }
}

/// `x[j][k] = [sigma(j) = k]` with row and column one-hot constraints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationEncoding {
    pub name: String,
    pub size: usize,
    /// `vars[j][k]` for 0-based position `j` and value `k`.
    pub vars: Vec<Vec<Var>>,
}

pub fn encode_permutation(name: &str, n: usize) -> Result<PermutationEncoding, EncodingError> {
    if n == 0 {
        return Err(EncodingError::EmptyPermutation(name.to_string()));
    }
    let vars = (1..=n)
        .map(|j| (1..=n).map(|k| Var::new(format!("{name}[{j},{k}]"))).collect())
        .collect();
    Ok(PermutationEncoding {
        name: name.to_string(),
        size: n,
        vars,
    })
}

impl PermutationEncoding {
    pub fn num_vars(&self) -> usize {
        self.size * self.size
    }

    /// Variable for `sigma(position) = value`, both 1-based.
    pub fn var(&self, position: usize, value: usize) -> Option<&Var> {
        if position == 0 || value == 0 {
            return None;
        }
        self.vars.get(position - 1)?.get(value - 1)
    }

    /// `sum_k x[j][k] - 1` for each position `j`.
    pub fn row_constraints(&self) -> Vec<Polynomial> {
        self.vars.iter().map(|row| sum_minus_one(row.iter())).collect()
    }

    /// `sum_j x[j][k] - 1` for each value `k`.
    pub fn column_constraints(&self) -> Vec<Polynomial> {
        (0..self.size).map(|k| sum_minus_one(self.vars.iter().map(|row| &row[k]))).collect()
    }

    pub fn constraints(&self) -> Vec<Polynomial> {
        let mut all = self.row_constraints();
        all.extend(self.column_constraints());
        all
    }

    /// `sum_{j,k} c[j][k] x[j][k]` for a square cost matrix.
    pub fn linear_assignment_objective(&self, costs: &[Vec<Coeff>]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (row, crow) in self.vars.iter().zip(costs) {
            for (v, c) in row.iter().zip(crow) {
                p.add_term(crate::polynomial::Monomial::new([v.clone()]), *c);
            }
        }
        p
    }

    /// `sigma` as 1-based values, or `None` when the matrix is not a
    /// permutation matrix.
    pub fn decode(&self, x: &Assignment) -> Result<Option<Vec<usize>>, PolynomialError> {
        let mut sigma = Vec::with_capacity(self.size);
        let mut used = vec![false; self.size];
        for row in &self.vars {
            let mut chosen = None;
            for (k, v) in row.iter().enumerate() {
                if x.get(v).ok_or_else(|| PolynomialError::MissingVariable(v.clone()))? {
                    if chosen.is_some() {
                        return Ok(None);
                    }
                    chosen = Some(k);
                }
            }
            match chosen {
                Some(k) if !used[k] => {
                    used[k] = true;
                    sigma.push(k + 1);
                }
                _ => return Ok(None),
            }
        }
        Ok(Some(sigma))
    }
}

fn sum_minus_one<'a>(vars: impl Iterator<Item = &'a Var>) -> Polynomial {
    let mut p = Polynomial::constant(-1);
    for v in vars {
        p += &Polynomial::var(v.clone());
    }
    p
}

/// Predicate over categorical and permutation variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IversonExpr {
    Or(Box<IversonExpr>, Box<IversonExpr>),
    And(Box<IversonExpr>, Box<IversonExpr>),
    Not(Box<IversonExpr>),
    /// `[u = level]`
    EqLevel { var: String, level: String },
    /// `[u = v]` for two categorical variables
    EqVars(String, String),
    /// `[sigma(position) = value]`, 1-based
    EqPosition { perm: String, position: usize, value: usize },
}

impl IversonExpr {
    pub fn or(p: IversonExpr, q: IversonExpr) -> Self {
        IversonExpr::Or(Box::new(p), Box::new(q))
    }

    pub fn and(p: IversonExpr, q: IversonExpr) -> Self {
        IversonExpr::And(Box::new(p), Box::new(q))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: IversonExpr) -> Self {
        IversonExpr::Not(Box::new(p))
    }

    pub fn eq_level(var: &str, level: &str) -> Self {
        IversonExpr::EqLevel {
            var: var.to_string(),
            level: level.to_string(),
        }
    }

    pub fn eq_vars(u: &str, v: &str) -> Self {
        IversonExpr::EqVars(u.to_string(), v.to_string())
    }
}

fn categorical<'r>(registry: &'r VariableRegistry, name: &str) -> Result<&'r OneHotEncoding, EncodingError> {
    match registry.get(name) {
        None => Err(EncodingError::UnknownVariable(name.to_string())),
        Some(d) => d.as_categorical().ok_or_else(|| EncodingError::NotCategorical(name.to_string())),
    }
}

/// Expands `[e]` recursively: OR → `[P]+[Q]-[P][Q]`, AND → `[P][Q]`,
/// NOT → `1-[P]`, `[u=l]` → `x_l`, `[u=v]` → `sum_l x_l y_l`.
pub fn expand_iverson(e: &IversonExpr, registry: &VariableRegistry) -> Result<Polynomial, EncodingError> {
    Ok(match e {
        IversonExpr::Or(p, q) => {
            let p = expand_iverson(p, registry)?;
            let q = expand_iverson(q, registry)?;
            &(&p + &q) - &(&p * &q)
        }
        IversonExpr::And(p, q) => &expand_iverson(p, registry)? * &expand_iverson(q, registry)?,
        IversonExpr::Not(p) => &Polynomial::constant(1) - &expand_iverson(p, registry)?,
        IversonExpr::EqLevel { var, level } => {
            let enc = categorical(registry, var)?;
            let v = enc.indicator(level).ok_or_else(|| EncodingError::UnknownLevel {
                var: var.clone(),
                level: level.clone(),
            })?;
            Polynomial::var(v.clone())
        }
        IversonExpr::EqVars(u, v) => {
            let eu = categorical(registry, u)?;
            let ev = categorical(registry, v)?;
            let mut p = Polynomial::zero();
            for (level, xu) in eu.levels.iter().zip(&eu.indicators) {
                if let Some(xv) = ev.indicator(level) {
                    p += &Polynomial::term([xu.clone(), xv.clone()], 1);
                }
            }
            p
        }
        IversonExpr::EqPosition { perm, position, value } => {
            let enc = match registry.get(perm) {
                None => return Err(EncodingError::UnknownVariable(perm.clone())),
                Some(d) => d.as_permutation().ok_or_else(|| EncodingError::NotPermutation(perm.clone()))?,
            };
            let v = enc.var(*position, *value).ok_or_else(|| EncodingError::PermutationIndex {
                perm: perm.clone(),
                size: enc.size,
                position: *position,
                value: *value,
            })?;
            Polynomial::var(v.clone())
        }
    })
}

/// A possibly negated Boolean variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn pos(v: impl Into<Var>) -> Self {
        Literal { var: v.into(), positive: true }
    }

    pub fn neg(v: impl Into<Var>) -> Self {
        Literal { var: v.into(), positive: false }
    }

    pub fn is_satisfied(&self, x: &Assignment) -> Option<bool> {
        x.get(&self.var).map(|b| b == self.positive)
    }
}

pub type Clause = Vec<Literal>;

/// Sum over clauses of `prod (1 - x_j)` over positive literals times
/// `prod x_j` over negated ones: the number of unsatisfied clauses.
pub fn maxsat_objective(clauses: &[Clause]) -> Result<Polynomial, EncodingError> {
    if clauses.is_empty() {
        return Err(EncodingError::NoClauses);
    }
    let mut f = Polynomial::zero();
    for (index, clause) in clauses.iter().enumerate() {
        for (i, lit) in clause.iter().enumerate() {
            if clause[..i].iter().any(|o| o.var == lit.var && o.positive != lit.positive) {
                return Err(EncodingError::TautologicalClause {
                    index,
                    var: lit.var.clone(),
                });
            }
        }
        let mut unsat = Polynomial::constant(1);
        for lit in clause {
            let x = Polynomial::var(lit.var.clone());
            let factor = if lit.positive { &Polynomial::constant(1) - &x } else { x };
            unsat = &unsat * &factor;
        }
        f += &unsat;
    }
    Ok(f)
}


#[cfg(test)]
mod tests {
    use super::tests_support::example_clauses;
    use super::*;
    use crate::polynomial::tests::{k, r, x};
    use crate::polynomial::Monomial;

    fn lin(c0: i128, ws: &[(usize, i128)]) -> Polynomial {
        let mut p = k(c0);
        for (i, w) in ws {
            p += &x(*i).scale(r(*w, 1));
        }
        p
    }

    #[test]
    fn integer_encodings_from_worked_examples() {
        let e = encode_integer("z", "x", 0, 7).unwrap();
        assert_eq!(e.decode_polynomial(), lin(0, &[(1, 1), (2, 2), (3, 4)]));
        let e = encode_integer("z", "x", 0, 5).unwrap();
        assert_eq!(e.decode_polynomial(), lin(0, &[(1, 1), (2, 2), (3, 2)]));
        let e = encode_integer("z", "x", -3, 3).unwrap();
        assert_eq!(e.decode_polynomial(), lin(-3, &[(1, 1), (2, 2), (3, 3)]));
    }

    #[test]
    fn degenerate_domains() {
        let single = encode_integer("z", "x", 4, 4).unwrap();
        assert_eq!(single.num_bits(), 0);
        assert_eq!(single.decode_polynomial(), k(4));
        let pair = encode_integer("z", "x", 4, 5).unwrap();
        assert_eq!(pair.decode_polynomial(), lin(4, &[(1, 1)]));
        assert!(matches!(
            encode_integer("z", "x", 3, 2),
            Err(EncodingError::EmptyDomain { .. })
        ));
    }

    #[test]
    fn decode_integer_examples() {
        let e = encode_integer("z", "x", -3, 3).unwrap();
        let at = |b: [bool; 3]| e.decode(&Assignment::from_bits(&e.bits, &b)).unwrap();
        assert_eq!(at([false, true, false]), -1);
        assert_eq!(at([true, true, false]), 0);
        assert_eq!(at([false, false, true]), 0);
        assert_eq!(at([false, false, false]), -3);
    }

    #[test]
    fn slack_widths() {
        let e = encode_integer("s", "t", 0, 24).unwrap();
        assert_eq!(e.weights, vec![1, 2, 4, 8, 9]);
        let e = encode_integer("s", "t", 0, 4).unwrap();
        assert_eq!(e.weights, vec![1, 2, 1]);
    }

    #[test]
    fn every_value_reachable_and_in_range() {
        for a in -5i128..=3 {
            for c in a..=a + 40 {
                let e = encode_integer("z", "x", a, c).unwrap();
                let n = e.num_bits();
                let mut seen = vec![false; (c - a + 1) as usize];
                for w in 0..(1u32 << n) {
                    let bits: Vec<bool> = (0..n).map(|j| w >> j & 1 == 1).collect();
                    let z = e.decode(&Assignment::from_bits(&e.bits, &bits)).unwrap();
                    assert!((a..=c).contains(&z), "[{a},{c}] decoded {z}");
                    seen[(z - a) as usize] = true;
                }
                assert!(seen.iter().all(|s| *s), "[{a},{c}] not surjective");
                for v in a..=c {
                    let bits = e.encode_value(v).unwrap();
                    assert_eq!(e.decode(&Assignment::from_bits(&e.bits, &bits)).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn one_hot_constraint() {
        let levels: Vec<String> = ["red", "blue", "green"].iter().map(|s| s.to_string()).collect();
        let e = encode_categorical("u", &levels).unwrap();
        let expected = &(&(&Polynomial::var("u=red") + &Polynomial::var("u=blue")) + &Polynomial::var("u=green")) - &k(1);
        assert_eq!(e.constraint(), expected);
        assert_eq!(e.constraint().degree(), 1);
        let two = encode_categorical("b", &levels[..2]).unwrap();
        assert_eq!(two.indicators.len(), 2);
        assert!(matches!(
            encode_categorical("u", &["a".into(), "a".into()]),
            Err(EncodingError::DuplicateLevel { .. })
        ));
        assert!(matches!(encode_categorical("u", &["a".into()]), Err(EncodingError::TooFewLevels(_))));
    }

    #[test]
    fn permutation_shapes() {
        let p1 = encode_permutation("p", 1).unwrap();
        assert_eq!(p1.num_vars(), 1);
        let cs = p1.constraints();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| *c == &Polynomial::var("p[1,1]") - &k(1)));
        let p3 = encode_permutation("p", 3).unwrap();
        assert_eq!(p3.num_vars(), 9);
        assert_eq!(p3.constraints().len(), 6);
        assert!(encode_permutation("p", 0).is_err());
    }

    #[test]
    fn linear_assignment_objective_is_cost_weighted_indicators() {
        let p = encode_permutation("p", 2).unwrap();
        let costs = vec![vec![r(3, 1), r(1, 1)], vec![r(2, 1), r(5, 1)]];
        let f = p.linear_assignment_objective(&costs);
        assert_eq!(f.coefficient(&Monomial::new(["p[1,2]"])), r(1, 1));
        assert_eq!(f.coefficient(&Monomial::new(["p[2,2]"])), r(5, 1));
        assert_eq!(f.len(), 4);
        // sigma = (2, 1) costs c[1][2] + c[2][1] = 3
        let mut a = Assignment::new();
        for (j, kk) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            a.set(p.var(j, kk).unwrap().clone(), (j, kk) == (1, 2) || (j, kk) == (2, 1));
        }
        assert_eq!(f.evaluate(&a).unwrap(), r(3, 1));
        assert_eq!(p.decode(&a).unwrap(), Some(vec![2, 1]));
    }

    fn colors() -> Vec<String> {
        ["red", "blue", "green"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn iverson_rules() {
        let mut reg = VariableRegistry::new();
        reg.declare_categorical("u", &colors()).unwrap();
        reg.declare_categorical("v", &colors()).unwrap();
        let not_red = expand_iverson(&IversonExpr::not(IversonExpr::eq_level("u", "red")), &reg).unwrap();
        assert_eq!(not_red, &k(1) - &Polynomial::var("u=red"));
        let same = expand_iverson(&IversonExpr::eq_vars("u", "v"), &reg).unwrap();
        let expected: Polynomial = colors()
            .iter()
            .map(|l| Polynomial::term([format!("u={l}"), format!("v={l}")], 1))
            .sum();
        assert_eq!(same, expected);
        let p = IversonExpr::eq_level("u", "red");
        let pp = expand_iverson(&IversonExpr::and(p.clone(), p.clone()), &reg).unwrap();
        assert_eq!(pp, Polynomial::var("u=red"));
        assert!(matches!(
            expand_iverson(&IversonExpr::eq_level("u", "pink"), &reg),
            Err(EncodingError::UnknownLevel { .. })
        ));
        assert!(matches!(
            expand_iverson(&IversonExpr::eq_level("w", "red"), &reg),
            Err(EncodingError::UnknownVariable(_))
        ));
    }

    #[test]
    fn graph_coloring_objective() {
        let mut reg = VariableRegistry::new();
        for j in 1..=3 {
            reg.declare_categorical(&format!("u{j}"), &colors()).unwrap();
        }
        let edges = [(1, 2), (2, 3), (1, 3)];
        let f: Polynomial = edges
            .iter()
            .map(|(a, b)| expand_iverson(&IversonExpr::eq_vars(&format!("u{a}"), &format!("u{b}")), &reg).unwrap())
            .sum();
        let expected: Polynomial = edges
            .iter()
            .flat_map(|(a, b)| colors().into_iter().map(move |l| Polynomial::term([format!("u{a}={l}"), format!("u{b}={l}")], 1)))
            .sum();
        assert_eq!(f, expected);
    }

    #[test]
    fn maxsat_objectives() {
        let one = maxsat_objective(&example_clauses()[..1]).unwrap();
        assert_eq!(one, &(&(&k(1) - &x(1)) * &x(2)) * &(&k(1) - &x(3)));
        let f = maxsat_objective(&example_clauses()).unwrap();
        let expected = &(&(&(&Polynomial::term(["x1", "x2", "x3"], 1) - &Polynomial::term(["x2", "x3"], 2))
            - &Polynomial::term(["x1", "x3"], 1))
            + &x(2))
            + &x(3);
        assert_eq!(f, expected);
        let unit = maxsat_objective(&[vec![Literal::pos("x1")]]).unwrap();
        assert_eq!(unit, &k(1) - &x(1));
        assert!(matches!(
            maxsat_objective(&[vec![Literal::pos("x1"), Literal::neg("x1")]]),
            Err(EncodingError::TautologicalClause { .. })
        ));
        assert_eq!(maxsat_objective(&[]), Err(EncodingError::NoClauses));
    }
}
