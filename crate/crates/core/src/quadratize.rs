//! Order reduction of pseudo-Boolean polynomials to quadratic form.
//!
//! Two transforms are available:
//!
//! * Rosenberg substitution (global): pick a pair `x, y`, replace `xy` by a
//!   fresh `z` in every term containing both, and add the gadget
//!   `P (xy - 2xz - 2yz + 3z)`, which is `0` iff `z = xy` and at least `P`
//!   otherwise.
//! * Negative-monomial transform (local): `a prod_{j in S} x_j` with
//!   `a < 0` becomes `a (sum_{j in S} x_j - |S| + 1) t` for a fresh `t`;
//!   minimizing over `t` gives back the monomial.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penalty::penalty_constant;
use crate::polynomial::{format_coeff, Coeff, Monomial, Polynomial, Var};
use crate::registry::VariableRegistry;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadratizeError {
    #[error("term {monomial} has positive coefficient {coef}; the local transform only handles negative high-order terms (use the rosenberg or hybrid strategy)")]
    PositiveHighOrderTerm { monomial: String, coef: String },
    #[error("Rosenberg penalty constant must be positive, got {0}")]
    NonPositivePenalty(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Rosenberg,
    Local,
    /// Local transform on negative high-order terms, Rosenberg on the rest.
    Hybrid,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rosenberg" => Ok(Strategy::Rosenberg),
            "local" => Ok(Strategy::Local),
            "hybrid" => Ok(Strategy::Hybrid),
            other => Err(format!("unknown strategy `{other}` (expected rosenberg, local or hybrid)")),
        }
    }
}

/// One Rosenberg step: `aux = left * right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub left: Var,
    pub right: Var,
    pub aux: Var,
    #[serde(with = "crate::polynomial::coeff_str")]
    pub penalty_constant: Coeff,
    /// `P (xy - 2xz - 2yz + 3z)`, already scaled.
    pub gadget: Polynomial,
}

/// One local transform: `coef * prod(monomial)` replaced through `aux`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReplacement {
    pub monomial: Monomial,
    #[serde(with = "crate::polynomial::coeff_str")]
    pub coef: Coeff,
    pub aux: Var,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratizationReport {
    pub format_version: u32,
    pub strategy: Strategy,
    pub input: Polynomial,
    pub output: Polynomial,
    pub substitutions: Vec<Substitution>,
    pub local: Vec<LocalReplacement>,
}

impl QuadratizationReport {
    fn passthrough(strategy: Strategy, f: &Polynomial) -> Self {
        QuadratizationReport {
            format_version: crate::FORMAT_VERSION,
            strategy,
            input: f.clone(),
            output: f.clone(),
            substitutions: Vec::new(),
            local: Vec::new(),
        }
    }

    /// Auxiliary variables in creation order.
    pub fn auxiliaries(&self) -> Vec<Var> {
        self.local
            .iter()
            .map(|l| l.aux.clone())
            .chain(self.substitutions.iter().map(|s| s.aux.clone()))
            .collect()
    }
}

/// `P (xy - 2xz - 2yz + 3z)`.
pub fn rosenberg_gadget(x: &Var, y: &Var, z: &Var, p: Coeff) -> Polynomial {
    Polynomial::from_terms([
        (Monomial::new([x.clone(), y.clone()]), p),
        (Monomial::new([x.clone(), z.clone()]), p * Coeff::from_integer(-2)),
        (Monomial::new([y.clone(), z.clone()]), p * Coeff::from_integer(-2)),
        (Monomial::new([z.clone()]), p * Coeff::from_integer(3)),
    ])
}

/// Most frequent pair across terms of degree ≥ 3. Ties go to the pair with
/// the larger total `|a_S|` over all terms containing it, then to the
/// smallest pair.
fn choose_pair(f: &Polynomial) -> Option<(Var, Var)> {
    let mut counts: BTreeMap<(Var, Var), usize> = BTreeMap::new();
    for (m, _) in f.terms().filter(|(m, _)| m.degree() >= 3) {
        let vs = m.vars();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                *counts.entry((vs[i].clone(), vs[j].clone())).or_default() += 1;
            }
        }
    }
    let top = *counts.values().max()?;
    let weight = |(x, y): &(Var, Var)| -> Coeff {
        f.terms()
            .filter(|(m, _)| m.contains(x) && m.contains(y))
            .map(|(_, c)| c.abs())
            .sum()
    };
    let mut best: Option<((Var, Var), Coeff)> = None;
    for (pair, _) in counts.into_iter().filter(|(_, c)| *c == top) {
        let w = weight(&pair);
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((pair, w));
        }
    }
    best.map(|(p, _)| p)
}

fn replace_pair(f: &Polynomial, x: &Var, y: &Var, z: &Var) -> Polynomial {
    Polynomial::from_terms(f.terms().map(|(m, c)| {
        if m.contains(x) && m.contains(y) {
            (m.without(x).without(y).union(&Monomial::new([z.clone()])), *c)
        } else {
            (m.clone(), *c)
        }
    }))
}

/// Repeated Rosenberg substitution until the degree is at most 2.
///
/// `penalty` defaults to `penalty_constant(f)`. Gadgets are kept apart
/// from the objective while iterating, so later substitutions never
/// rewrite earlier gadgets; this keeps one `P` valid for every step.
pub fn rosenberg_quadratize(
    f: &Polynomial,
    penalty: Option<Coeff>,
    registry: &mut VariableRegistry,
) -> Result<QuadratizationReport, QuadratizeError> {
    let mut report = QuadratizationReport::passthrough(Strategy::Rosenberg, f);
    if f.degree() <= 2 {
        return Ok(report);
    }
    let p = penalty.unwrap_or_else(|| penalty_constant(f));
    if !p.is_positive() {
        return Err(QuadratizeError::NonPositivePenalty(format_coeff(&p)));
    }
    registry.reserve(f.variables());
    let mut objective = f.clone();
    let mut gadgets = Polynomial::zero();
    while let Some((x, y)) = choose_pair(&objective) {
        let z = registry.add_auxiliary("z");
        objective = replace_pair(&objective, &x, &y, &z);
        let gadget = rosenberg_gadget(&x, &y, &z, p);
        gadgets += &gadget;
        report.substitutions.push(Substitution {
            left: x,
            right: y,
            aux: z,
            penalty_constant: p,
            gadget,
        });
    }
    report.output = objective + gadgets;
    Ok(report)
}

fn local_gadget(m: &Monomial, coef: Coeff, t: &Var) -> Polynomial {
    let mut p = Polynomial::constant(1 - m.degree() as i128);
    for v in m.vars() {
        p += &Polynomial::var(v.clone());
    }
    (&p * &Polynomial::var(t.clone())).scale(coef)
}

fn apply_local(
    f: &Polynomial,
    registry: &mut VariableRegistry,
    report: &mut QuadratizationReport,
) -> Polynomial {
    registry.reserve(f.variables());
    let mut out = Polynomial::zero();
    for (m, c) in f.terms() {
        if m.degree() >= 3 && c.is_negative() {
            let t = registry.add_auxiliary("aux");
            out += &local_gadget(m, *c, &t);
            report.local.push(LocalReplacement {
                monomial: m.clone(),
                coef: *c,
                aux: t,
            });
        } else {
            out.add_term(m.clone(), *c);
        }
    }
    out
}

/// Replaces every negative term of degree ≥ 3 by its local gadget.
/// Positive high-order terms are rejected.
pub fn negative_monomial_quadratize(
    f: &Polynomial,
    registry: &mut VariableRegistry,
) -> Result<QuadratizationReport, QuadratizeError> {
    if let Some((m, c)) = f.terms().find(|(m, c)| m.degree() >= 3 && c.is_positive()) {
        return Err(QuadratizeError::PositiveHighOrderTerm {
            monomial: m.to_string(),
            coef: format_coeff(c),
        });
    }
    let mut report = QuadratizationReport::passthrough(Strategy::Local, f);
    report.output = apply_local(f, registry, &mut report);
    Ok(report)
}

/// Dispatches on `strategy`. For `Hybrid`, the Rosenberg stage defaults its
/// penalty to `penalty_constant` of the polynomial left after the local
/// stage.
pub fn quadratize(
    f: &Polynomial,
    strategy: Strategy,
    penalty: Option<Coeff>,
    registry: &mut VariableRegistry,
) -> Result<QuadratizationReport, QuadratizeError> {
    match strategy {
        Strategy::Rosenberg => rosenberg_quadratize(f, penalty, registry),
        Strategy::Local => negative_monomial_quadratize(f, registry),
        Strategy::Hybrid => {
            let mut report = QuadratizationReport::passthrough(Strategy::Hybrid, f);
            let partial = apply_local(f, registry, &mut report);
            let rest = rosenberg_quadratize(&partial, penalty, registry)?;
            report.substitutions = rest.substitutions;
            report.output = rest.output;
            Ok(report)
        }
    }
}
