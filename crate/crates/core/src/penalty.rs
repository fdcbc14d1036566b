//! Constraint elimination: slack variables for inequalities, squared
//! penalties, and the shared penalty constant `P = ub(f) - lb(f) + 1`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::IntegerEncoding;
use crate::polynomial::{format_coeff, Assignment, Coeff, Polynomial, PolynomialError};
use crate::registry::{RegistryError, VariableRegistry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PenaltyError {
    #[error("constraint `{0}` has non-integer coefficients; multiply it by a common denominator first")]
    NonIntegerCoefficients(String),
    #[error("constraint `{constraint}` can never hold: its lower bound {lower_bound} is positive")]
    Infeasible { constraint: String, lower_bound: String },
    #[error("penalty constant must be positive, got {0}")]
    NonPositivePenalty(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `h(x) = 0`
    #[serde(rename = "==")]
    Eq,
    /// `h(x) <= 0`
    #[serde(rename = "<=")]
    Leq,
}

/// A binarized constraint `h(x) = 0` or `h(x) <= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub id: String,
    pub relation: Relation,
    pub h: Polynomial,
}

impl Constraint {
    pub fn eq(id: impl Into<String>, h: Polynomial) -> Self {
        Constraint {
            id: id.into(),
            relation: Relation::Eq,
            h,
        }
    }

    pub fn leq(id: impl Into<String>, h: Polynomial) -> Self {
        Constraint {
            id: id.into(),
            relation: Relation::Leq,
            h,
        }
    }

    pub fn is_satisfied(&self, x: &Assignment) -> Result<bool, PolynomialError> {
        let v = self.h.evaluate(x)?;
        Ok(match self.relation {
            Relation::Eq => v.is_zero(),
            Relation::Leq => !v.is_positive(),
        })
    }
}

/// `1 + sum_{S≠∅} |a_S|`, which equals `ub(f) - lb(f) + 1`.
pub fn penalty_constant(f: &Polynomial) -> Coeff {
    Coeff::from_integer(1) + f.abs_coefficient_sum()
}

/// `P * h^2`.
pub fn penalize_equality(h: &Polynomial, p: Coeff) -> Polynomial {
    (h * h).scale(p)
}

/// Turns `h <= 0` into `(h + s)^2` with a binarized slack `s ∈ [0, -lb(h)]`.
/// No slack is introduced when `lb(h) = 0`.
///
/// The returned penalty is unscaled.
pub fn penalize_inequality(
    id: &str,
    h: &Polynomial,
    registry: &mut VariableRegistry,
) -> Result<(Polynomial, Option<IntegerEncoding>), PenaltyError> {
    if !h.has_integer_coefficients() {
        return Err(PenaltyError::NonIntegerCoefficients(id.to_string()));
    }
    let lb = h.lower_bound();
    if lb.is_positive() {
        return Err(PenaltyError::Infeasible {
            constraint: id.to_string(),
            lower_bound: format_coeff(&lb),
        });
    }
    if lb.is_zero() {
        return Ok((h * h, None));
    }
    let slack = registry.add_slack(id, -lb.to_integer())?;
    let shifted = h + &slack.decode_polynomial();
    Ok((&shifted * &shifted, Some(slack)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyTerm {
    pub constraint: Constraint,
    /// `h^2` or `(h + s)^2`, before scaling by the penalty constant.
    pub penalty: Polynomial,
    pub slack: Option<IntegerEncoding>,
}

/// Objective plus scaled penalties: `f' = f + P * sum_i penalty_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenalizedProblem {
    pub objective: Polynomial,
    #[serde(with = "crate::polynomial::coeff_str")]
    pub penalty_constant: Coeff,
    pub terms: Vec<PenaltyTerm>,
    pub assembled: Polynomial,
}

impl PenalizedProblem {
    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.terms.iter().map(|t| &t.constraint)
    }

    pub fn slacks(&self) -> impl Iterator<Item = &IntegerEncoding> {
        self.terms.iter().filter_map(|t| t.slack.as_ref())
    }

    /// Whether `x` satisfies every original constraint. Slack bits are
    /// not consulted.
    pub fn is_feasible(&self, x: &Assignment) -> Result<bool, PolynomialError> {
        for c in self.constraints() {
            if !c.is_satisfied(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Folds every constraint into the objective with one shared penalty
/// constant. `penalty` overrides `penalty_constant(f)`.
pub fn assemble(
    f: &Polynomial,
    constraints: &[Constraint],
    registry: &mut VariableRegistry,
    penalty: Option<Coeff>,
) -> Result<PenalizedProblem, PenaltyError> {
    let p = penalty.unwrap_or_else(|| penalty_constant(f));
    if !p.is_positive() {
        return Err(PenaltyError::NonPositivePenalty(format_coeff(&p)));
    }
    let mut assembled = f.clone();
    let mut terms = Vec::with_capacity(constraints.len());
    for c in constraints {
        let (penalty, slack) = match c.relation {
            Relation::Eq => {
                if !c.h.has_integer_coefficients() {
                    return Err(PenaltyError::NonIntegerCoefficients(c.id.clone()));
                }
                (&c.h * &c.h, None)
            }
            Relation::Leq => penalize_inequality(&c.id, &c.h, registry)?,
        };
        assembled += &penalty.scale(p);
        terms.push(PenaltyTerm {
            constraint: c.clone(),
            penalty,
            slack,
        });
    }
    Ok(PenalizedProblem {
        objective: f.clone(),
        penalty_constant: p,
        terms,
        assembled,
    })
}
