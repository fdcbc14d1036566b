//! JSON problem format.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "sense": "min",
//!   "variables": [
//!     {"name": "z", "type": "int", "lower": -3, "upper": 3, "bit_prefix": "x"},
//!     {"name": "b", "type": "bool"},
//!     {"name": "u", "type": "categorical", "levels": ["red", "blue"]},
//!     {"name": "p", "type": "permutation", "size": 3}
//!   ],
//!   "objective": {
//!     "polynomial": [{"factors": {"z": 3}, "coef": 1}, {"factors": {"z": 1}, "coef": -6}],
//!     "clauses": [["b", "-c"]],
//!     "iverson": [{"weight": 1, "expr": {"eq_vars": ["u", "v"]}}],
//!     "permutation_costs": [{"perm": "p", "costs": [[1, 2, 3], [3, 1, 2], [2, 3, 1]]}]
//!   },
//!   "constraints": [{"id": "cap", "polynomial": [{"factors": {"z": 2}, "coef": 1}, {"factors": {}, "coef": -7}], "relation": "<="}]
//! }
//! ```
//!
//! Every objective part is optional and the parts are summed. Integer
//! polynomials (objective and constraints) may use `bool` and `int`
//! variables; clause literals name `bool` variables, with a leading `-`
//! for negation. A constraint reads `polynomial == 0` or `polynomial <= 0`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimacs::Cnf;
use crate::encoding::{bits_for_domain, IversonExpr};
use crate::penalty::Relation;
use crate::polynomial::IntegerPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unsupported format_version {0} (this build reads {max})", max = crate::FORMAT_VERSION)]
    Version(u32),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum VariableDecl {
    Bool {
        name: String,
    },
    Int {
        name: String,
        lower: i64,
        upper: i64,
        /// Bits are `{bit_prefix}1..`; defaults to `{name}.`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bit_prefix: Option<String>,
    },
    Categorical {
        name: String,
        levels: Vec<String>,
    },
    Permutation {
        name: String,
        size: usize,
    },
}

impl VariableDecl {
    pub fn name(&self) -> &str {
        match self {
            VariableDecl::Bool { name }
            | VariableDecl::Int { name, .. }
            | VariableDecl::Categorical { name, .. }
            | VariableDecl::Permutation { name, .. } => name,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            VariableDecl::Bool { .. } => "bool",
            VariableDecl::Int { .. } => "int",
            VariableDecl::Categorical { .. } => "categorical",
            VariableDecl::Permutation { .. } => "permutation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedPredicate {
    #[serde(default = "one")]
    pub weight: i128,
    pub expr: IversonExpr,
}

fn one() -> i128 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationCost {
    pub perm: String,
    /// `costs[j][k]` is paid when position `j + 1` holds value `k + 1`.
    pub costs: Vec<Vec<i128>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    #[serde(default, skip_serializing_if = "IntegerPolynomial::is_empty")]
    pub polynomial: IntegerPolynomial,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clauses: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iverson: Vec<WeightedPredicate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub permutation_costs: Vec<PermutationCost>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub polynomial: IntegerPolynomial,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default = "current_version")]
    pub format_version: u32,
    #[serde(default)]
    pub sense: Sense,
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintSpec>,
}

fn current_version() -> u32 {
    crate::FORMAT_VERSION
}

/// Splits `-x` into `("x", false)`.
pub fn parse_literal(text: &str) -> (&str, bool) {
    match text.strip_prefix('-') {
        Some(rest) => (rest, false),
        None => (text, true),
    }
}

impl ProblemSpec {
    /// Unconstrained MAX-SAT over `{prefix}1..{prefix}n`.
    pub fn from_cnf(cnf: &Cnf, prefix: &str) -> Self {
        let variables = (1..=cnf.num_vars)
            .map(|k| VariableDecl::Bool {
                name: format!("{prefix}{k}"),
            })
            .collect();
        let clauses = cnf
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| format!("{}{prefix}{}", if l < 0 { "-" } else { "" }, l.unsigned_abs()))
                    .collect()
            })
            .collect();
        ProblemSpec {
            format_version: crate::FORMAT_VERSION,
            sense: Sense::Min,
            variables,
            objective: Objective {
                clauses,
                ..Objective::default()
            },
            constraints: Vec::new(),
        }
    }

    pub fn constraint_id(&self, index: usize) -> String {
        self.constraints[index].id.clone().unwrap_or_else(|| format!("c{}", index + 1))
    }

    /// Checks everything that can be checked without building encodings.
    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.format_version != crate::FORMAT_VERSION {
            return Err(ProblemError::Version(self.format_version));
        }
        let mut kinds: BTreeMap<&str, &VariableDecl> = BTreeMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            let path = format!("variables[{i}]");
            if v.name().is_empty() {
                return Err(invalid(path, "empty variable name"));
            }
            if kinds.insert(v.name(), v).is_some() {
                return Err(invalid(path, format!("variable `{}` declared twice", v.name())));
            }
            match v {
                VariableDecl::Int { lower, upper, .. } => {
                    if lower > upper {
                        return Err(invalid(path, format!("lower bound {lower} exceeds upper bound {upper}")));
                    }
                    if bits_for_domain(*lower as i128, *upper as i128) > 62 {
                        return Err(invalid(path, "domain too wide"));
                    }
                }
                VariableDecl::Categorical { levels, .. } => {
                    if levels.len() < 2 {
                        return Err(invalid(path, "a categorical variable needs at least two levels"));
                    }
                    let distinct: BTreeSet<&String> = levels.iter().collect();
                    if distinct.len() != levels.len() {
                        return Err(invalid(path, "duplicate level"));
                    }
                }
                VariableDecl::Permutation { size, .. } => {
                    if *size == 0 {
                        return Err(invalid(path, "permutation size must be at least 1"));
                    }
                }
                VariableDecl::Bool { .. } => {}
            }
        }
        let numeric = |path: &str, p: &IntegerPolynomial| -> Result<(), ProblemError> {
            for name in p.variables() {
                match kinds.get(name) {
                    None => return Err(invalid(path, format!("undeclared variable `{name}`"))),
                    Some(VariableDecl::Bool { .. } | VariableDecl::Int { .. }) => {}
                    Some(d) => {
                        return Err(invalid(
                            path,
                            format!("`{name}` is {}; polynomials accept bool and int variables", d.kind()),
                        ))
                    }
                }
            }
            Ok(())
        };
        numeric("objective.polynomial", &self.objective.polynomial)?;
        for (i, clause) in self.objective.clauses.iter().enumerate() {
            let path = format!("objective.clauses[{i}]");
            if clause.is_empty() {
                return Err(invalid(path, "empty clause"));
            }
            let mut seen: BTreeMap<&str, bool> = BTreeMap::new();
            for lit in clause {
                let (name, positive) = parse_literal(lit);
                match kinds.get(name) {
                    Some(VariableDecl::Bool { .. }) => {}
                    Some(_) => return Err(invalid(path, format!("`{name}` is not a bool variable"))),
                    None => return Err(invalid(path, format!("undeclared variable `{name}`"))),
                }
                if seen.insert(name, positive).is_some_and(|p| p != positive) {
                    return Err(invalid(path, format!("clause contains both `{name}` and its negation")));
                }
            }
        }
        for (i, w) in self.objective.iverson.iter().enumerate() {
            check_predicate(&format!("objective.iverson[{i}].expr"), &w.expr, &kinds)?;
        }
        for (i, pc) in self.objective.permutation_costs.iter().enumerate() {
            let path = format!("objective.permutation_costs[{i}]");
            match kinds.get(pc.perm.as_str()) {
                Some(VariableDecl::Permutation { size, .. }) => {
                    if pc.costs.len() != *size || pc.costs.iter().any(|r| r.len() != *size) {
                        return Err(invalid(path, format!("cost matrix must be {size}x{size}")));
                    }
                }
                Some(_) => return Err(invalid(path, format!("`{}` is not a permutation", pc.perm))),
                None => return Err(invalid(path, format!("undeclared variable `{}`", pc.perm))),
            }
        }
        let mut ids = BTreeSet::new();
        for (i, c) in self.constraints.iter().enumerate() {
            numeric(&format!("constraints[{i}].polynomial"), &c.polynomial)?;
            if !ids.insert(self.constraint_id(i)) {
                return Err(invalid(format!("constraints[{i}].id"), "duplicate constraint id"));
            }
        }
        Ok(())
    }
}

fn check_predicate(path: &str, e: &IversonExpr, kinds: &BTreeMap<&str, &VariableDecl>) -> Result<(), ProblemError> {
    let categorical = |name: &str| -> Result<&Vec<String>, ProblemError> {
        match kinds.get(name) {
            Some(VariableDecl::Categorical { levels, .. }) => Ok(levels),
            Some(_) => Err(invalid(path, format!("`{name}` is not categorical"))),
            None => Err(invalid(path, format!("undeclared variable `{name}`"))),
        }
    };
    match e {
        IversonExpr::Or(p, q) | IversonExpr::And(p, q) => {
            check_predicate(path, p, kinds)?;
            check_predicate(path, q, kinds)
        }
        IversonExpr::Not(p) => check_predicate(path, p, kinds),
        IversonExpr::EqLevel { var, level } => {
            if categorical(var)?.contains(level) {
                Ok(())
            } else {
                Err(invalid(path, format!("`{var}` has no level `{level}`")))
            }
        }
        IversonExpr::EqVars(u, v) => categorical(u).and(categorical(v)).map(|_| ()),
        IversonExpr::EqPosition { perm, position, value } => match kinds.get(perm.as_str()) {
            Some(VariableDecl::Permutation { size, .. }) => {
                if (1..=*size).contains(position) && (1..=*size).contains(value) {
                    Ok(())
                } else {
                    Err(invalid(path, format!("position and value must lie in 1..={size}")))
                }
            }
            Some(_) => Err(invalid(path, format!("`{perm}` is not a permutation"))),
            None => Err(invalid(path, format!("undeclared variable `{perm}`"))),
        },
    }
}

/// Parses and validates a problem. JSON errors carry line and column.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        ProblemError::Json {
            line: e.line(),
            column: e.column(),
            message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn print_problem(spec: &ProblemSpec) -> String {
    serde_json::to_string_pretty(spec).expect("problem specs always serialize")
}
