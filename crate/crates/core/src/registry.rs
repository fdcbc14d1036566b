//! Bookkeeping between problem-level variables and the binary variables
//! that represent them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{
    bits_for_domain, encode_categorical, encode_integer_with_bits, encode_permutation, EncodingError, IntegerEncoding,
    OneHotEncoding, PermutationEncoding,
};
use crate::polynomial::{Assignment, Polynomial, PolynomialError, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("variable `{0}` is declared twice")]
    Duplicate(String),
    #[error("binary variable name `{0}` is already in use")]
    NameClash(Var),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

/// A declared problem-level variable and its binary representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeclaredVar {
    Bool { name: String, var: Var },
    Integer(IntegerEncoding),
    Categorical(OneHotEncoding),
    Permutation(PermutationEncoding),
}

impl DeclaredVar {
    pub fn name(&self) -> &str {
        match self {
            DeclaredVar::Bool { name, .. } => name,
            DeclaredVar::Integer(e) => &e.name,
            DeclaredVar::Categorical(e) => &e.name,
            DeclaredVar::Permutation(e) => &e.name,
        }
    }

    pub fn binary_vars(&self) -> Vec<Var> {
        match self {
            DeclaredVar::Bool { var, .. } => vec![var.clone()],
            DeclaredVar::Integer(e) => e.bits.clone(),
            DeclaredVar::Categorical(e) => e.indicators.clone(),
            DeclaredVar::Permutation(e) => e.vars.iter().flatten().cloned().collect(),
        }
    }

    pub fn as_categorical(&self) -> Option<&OneHotEncoding> {
        match self {
            DeclaredVar::Categorical(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_permutation(&self) -> Option<&PermutationEncoding> {
        match self {
            DeclaredVar::Permutation(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<&IntegerEncoding> {
        match self {
            DeclaredVar::Integer(e) => Some(e),
            _ => None,
        }
    }

    /// Polynomial that the variable stands for inside an integer
    /// polynomial: the bit itself for Booleans, the decode sum for integers.
    pub fn decode_polynomial(&self) -> Option<Polynomial> {
        match self {
            DeclaredVar::Bool { var, .. } => Some(Polynomial::var(var.clone())),
            DeclaredVar::Integer(e) => Some(e.decode_polynomial()),
            _ => None,
        }
    }

    pub fn decode(&self, x: &Assignment) -> Result<Value, PolynomialError> {
        Ok(match self {
            DeclaredVar::Bool { var, .. } => {
                Value::Bool(x.get(var).ok_or_else(|| PolynomialError::MissingVariable(var.clone()))?)
            }
            DeclaredVar::Integer(e) => Value::Int(e.decode(x)?),
            DeclaredVar::Categorical(e) => Value::Level(e.decode(x)?),
            DeclaredVar::Permutation(e) => Value::Permutation(e.decode(x)?),
        })
    }
}

/// Decoded problem-level value. `None` payloads mark bit patterns that do
/// not satisfy the one-hot structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i128),
    Level(Option<String>),
    Permutation(Option<Vec<usize>>),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", u8::from(*b)),
            Value::Int(z) => write!(f, "{z}"),
            Value::Level(Some(l)) => f.write_str(l),
            Value::Permutation(Some(p)) => {
                let parts: Vec<String> = p.iter().map(usize::to_string).collect();
                write!(f, "({})", parts.join(" "))
            }
            Value::Level(None) | Value::Permutation(None) => f.write_str("?"),
        }
    }
}

/// Role a binary variable plays in the compiled model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Problem,
    Slack,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackVar {
    pub constraint: String,
    pub encoding: IntegerEncoding,
}

/// Maps problem variables to binary variables and allocates fresh ones.
///
/// `order()` lists binary variables in allocation order; models built from
/// a compilation use it as their row/column order.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VariableRegistry {
    declared: Vec<DeclaredVar>,
    slacks: Vec<SlackVar>,
    auxiliaries: Vec<Var>,
    order: Vec<Var>,
    roles: BTreeMap<Var, Role>,
    #[serde(skip)]
    reserved: BTreeSet<Var>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry whose fresh names avoid every variable of `p`. Useful for
    /// running a single pass on a bare polynomial.
    pub fn for_polynomial(p: &Polynomial) -> Self {
        let mut r = Self::new();
        r.reserve(p.variables());
        r
    }

    /// Marks names as taken without allocating them.
    pub fn reserve(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.reserved.extend(vars);
    }

    pub fn is_taken(&self, v: &Var) -> bool {
        self.roles.contains_key(v) || self.reserved.contains(v)
    }

    fn claim(&mut self, v: Var, role: Role) -> Result<(), RegistryError> {
        if self.roles.contains_key(&v) {
            return Err(RegistryError::NameClash(v));
        }
        self.reserved.remove(&v);
        self.roles.insert(v.clone(), role);
        self.order.push(v);
        Ok(())
    }

    fn claim_all(&mut self, vars: &[Var], role: Role) -> Result<(), RegistryError> {
        if let Some(v) = vars.iter().find(|v| self.roles.contains_key(*v)) {
            return Err(RegistryError::NameClash(v.clone()));
        }
        for v in vars {
            self.claim(v.clone(), role)?;
        }
        Ok(())
    }

    fn fresh_name(&self, prefix: &str) -> Var {
        (1usize..)
            .map(|k| Var::new(format!("{prefix}{k}")))
            .find(|v| !self.is_taken(v))
            .expect("unbounded search")
    }

    fn check_new(&self, name: &str) -> Result<(), RegistryError> {
        if self.get(name).is_some() {
            Err(RegistryError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn declare_bool(&mut self, name: &str) -> Result<Var, RegistryError> {
        self.check_new(name)?;
        let var = Var::new(name);
        self.claim(var.clone(), Role::Problem)?;
        self.declared.push(DeclaredVar::Bool {
            name: name.to_string(),
            var: var.clone(),
        });
        Ok(var)
    }

    /// Integer `name ∈ [a, c]`; bits are named `name.1 .. name.n`.
    pub fn declare_integer(&mut self, name: &str, a: i128, c: i128) -> Result<&IntegerEncoding, RegistryError> {
        self.declare_integer_with_prefix(name, a, c, &format!("{name}."))
    }

    /// Integer `name ∈ [a, c]` with bits `{prefix}1 .. {prefix}n`.
    pub fn declare_integer_with_prefix(
        &mut self,
        name: &str,
        a: i128,
        c: i128,
        prefix: &str,
    ) -> Result<&IntegerEncoding, RegistryError> {
        self.check_new(name)?;
        if a > c {
            return Err(EncodingError::EmptyDomain {
                name: name.to_string(),
                lower: a,
                upper: c,
            }
            .into());
        }
        let n = bits_for_domain(a, c);
        let bits: Vec<Var> = (1..=n).map(|j| Var::new(format!("{prefix}{j}"))).collect();
        let enc = encode_integer_with_bits(name, a, c, bits)?;
        self.claim_all(&enc.bits, Role::Problem)?;
        self.declared.push(DeclaredVar::Integer(enc));
        Ok(self.declared.last().and_then(DeclaredVar::as_integer).expect("just pushed"))
    }

    pub fn declare_categorical(&mut self, name: &str, levels: &[String]) -> Result<&OneHotEncoding, RegistryError> {
        self.check_new(name)?;
        let enc = encode_categorical(name, levels)?;
        self.claim_all(&enc.indicators, Role::Problem)?;
        self.declared.push(DeclaredVar::Categorical(enc));
        Ok(self.declared.last().and_then(DeclaredVar::as_categorical).expect("just pushed"))
    }

    pub fn declare_permutation(&mut self, name: &str, n: usize) -> Result<&PermutationEncoding, RegistryError> {
        self.check_new(name)?;
        let enc = encode_permutation(name, n)?;
        let vars: Vec<Var> = enc.vars.iter().flatten().cloned().collect();
        self.claim_all(&vars, Role::Problem)?;
        self.declared.push(DeclaredVar::Permutation(enc));
        Ok(self.declared.last().and_then(DeclaredVar::as_permutation).expect("just pushed"))
    }

    /// Slack `s ∈ [0, upper]` for `constraint`, with fresh bits `t1, t2, ...`.
    pub fn add_slack(&mut self, constraint: &str, upper: i128) -> Result<IntegerEncoding, RegistryError> {
        let n = bits_for_domain(0, upper);
        let mut bits = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let v = self.fresh_name("t");
            self.claim(v.clone(), Role::Slack)?;
            bits.push(v);
        }
        let enc = encode_integer_with_bits(&format!("slack[{constraint}]"), 0, upper, bits)?;
        self.slacks.push(SlackVar {
            constraint: constraint.to_string(),
            encoding: enc.clone(),
        });
        Ok(enc)
    }

    /// Fresh auxiliary variable `{prefix}1`, `{prefix}2`, ...
    pub fn add_auxiliary(&mut self, prefix: &str) -> Var {
        let v = self.fresh_name(prefix);
        self.claim(v.clone(), Role::Auxiliary).expect("fresh name is unused");
        self.auxiliaries.push(v.clone());
        v
    }

    pub fn get(&self, name: &str) -> Option<&DeclaredVar> {
        self.declared.iter().find(|d| d.name() == name)
    }

    pub fn declared(&self) -> &[DeclaredVar] {
        &self.declared
    }

    pub fn slacks(&self) -> &[SlackVar] {
        &self.slacks
    }

    pub fn auxiliaries(&self) -> &[Var] {
        &self.auxiliaries
    }

    /// Every allocated binary variable, in allocation order.
    pub fn order(&self) -> &[Var] {
        &self.order
    }

    pub fn role(&self, v: &Var) -> Option<Role> {
        self.roles.get(v).copied()
    }

    /// Binary variables belonging to declared problem variables.
    pub fn problem_vars(&self) -> Vec<Var> {
        self.order.iter().filter(|v| self.roles[*v] == Role::Problem).cloned().collect()
    }

    /// Problem-level values for every declared variable.
    pub fn decode(&self, x: &Assignment) -> Result<BTreeMap<String, Value>, PolynomialError> {
        self.declared.iter().map(|d| Ok((d.name().to_string(), d.decode(x)?))).collect()
    }
}
