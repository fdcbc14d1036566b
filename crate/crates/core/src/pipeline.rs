//! End-to-end compilation of a [`ProblemSpec`] and dispatch to a solver.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{expand_iverson, maxsat_objective, Literal};
use crate::ising::{ising_polynomial_from_pb, qubo_to_ising, IsingModel, IsingPolynomial, QuboModel};
use crate::optim::NelderMead;
use crate::penalty::{assemble, Constraint, PenalizedProblem, Relation};
use crate::polynomial::{format_coeff, Coeff, Polynomial, Var};
use crate::problem::{parse_literal, ProblemError, ProblemSpec, Sense, VariableDecl};
use crate::qaoa::{ExpectationMode, Qaoa, QaoaParams};
use crate::quadratize::{quadratize, QuadratizationReport, Strategy};
use crate::registry::{DeclaredVar, Role, VariableRegistry};
use crate::sampler::{brute_force_minimizers, decode_samples, sample, AnnealSchedule, DecodedSample, SampleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{stage}: {message}")]
    Compile { stage: &'static str, message: String },
    #[error("{backend}: {message}")]
    Backend { backend: &'static str, message: String },
}

impl PipelineError {
    /// Process exit status: 2 parse, 3 compile, 4 backend.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Problem(_) => 2,
            PipelineError::Compile { .. } => 3,
            PipelineError::Backend { .. } => 4,
        }
    }
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError::Compile {
        stage,
        message: e.to_string(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileFlags {
    pub strategy: Strategy,
    /// Constraint penalty constant; derived from the objective when absent.
    #[serde(with = "opt_coeff", default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<Coeff>,
    /// Rosenberg gadget constant; derived from the penalized polynomial when
    /// absent.
    #[serde(with = "opt_coeff", default, skip_serializing_if = "Option::is_none")]
    pub rosenberg_penalty: Option<Coeff>,
}

mod opt_coeff {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Option<Coeff>, s: S) -> Result<S::Ok, S::Error> {
        match c {
            Some(c) => s.serialize_some(&format_coeff(c)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Coeff>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| crate::polynomial::parse_coeff(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub format_version: u32,
    pub flags: CompileFlags,
}

/// Every stage of a compilation.
#[derive(Clone, Debug, Serialize)]
pub struct CompileOutput {
    pub metadata: Metadata,
    pub sense: Sense,
    pub registry: VariableRegistry,
    /// Objective in the original sense, before any negation.
    pub objective: Polynomial,
    pub penalized: PenalizedProblem,
    pub quadratization: QuadratizationReport,
    pub qubo: QuboModel,
    pub ising: IsingModel,
    /// Spin form of the penalized (not quadratized) polynomial.
    pub hamiltonian: IsingPolynomial,
    /// Qubit order for `hamiltonian`: every non-auxiliary binary variable.
    pub hamiltonian_variables: Vec<Var>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Registry,
    Objective,
    Penalized,
    Quadratization,
    Qubo,
    Ising,
    Hamiltonian,
    All,
}

impl std::str::FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "registry" => Stage::Registry,
            "objective" => Stage::Objective,
            "penalized" => Stage::Penalized,
            "quadratization" => Stage::Quadratization,
            "qubo" => Stage::Qubo,
            "ising" => Stage::Ising,
            "hamiltonian" => Stage::Hamiltonian,
            "all" => Stage::All,
            other => return Err(format!("unknown stage `{other}`")),
        })
    }
}

impl CompileOutput {
    pub fn stage_json(&self, s: Stage) -> serde_json::Value {
        let v = match s {
            Stage::Registry => serde_json::to_value(&self.registry),
            Stage::Objective => serde_json::to_value(&self.objective),
            Stage::Penalized => serde_json::to_value(&self.penalized),
            Stage::Quadratization => serde_json::to_value(&self.quadratization),
            Stage::Qubo => serde_json::to_value(&self.qubo),
            Stage::Ising => serde_json::to_value(&self.ising),
            Stage::Hamiltonian => serde_json::to_value(serde_json::json!({
                "format_version": crate::FORMAT_VERSION,
                "variables": self.hamiltonian_variables,
                "terms": self.hamiltonian,
            })),
            Stage::All => serde_json::to_value(self),
        };
        v.expect("compile output serializes")
    }

    /// Constraints checked when decoding samples, including the implicit
    /// one-hot ones.
    pub fn constraints(&self) -> Vec<Constraint> {
        self.penalized.constraints().cloned().collect()
    }

    pub fn order(&self) -> &[Var] {
        &self.qubo.variables
    }
}

fn binarize_objective(spec: &ProblemSpec, registry: &VariableRegistry) -> Result<Polynomial, PipelineError> {
    let o = &spec.objective;
    let decode = |name: &str| registry.get(name).and_then(DeclaredVar::decode_polynomial);
    let mut f = o.polynomial.binarize(decode).map_err(|n| stage::<String>("objective")(format!("unknown variable `{n}`")))?;
    if !o.clauses.is_empty() {
        let clauses: Vec<Vec<Literal>> = o
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| {
                        let (name, positive) = parse_literal(l);
                        Literal {
                            var: Var::new(name),
                            positive,
                        }
                    })
                    .collect()
            })
            .collect();
        f += &maxsat_objective(&clauses).map_err(stage("objective"))?;
    }
    for w in &o.iverson {
        let p = expand_iverson(&w.expr, registry).map_err(stage("objective"))?;
        f += &p.scale(Coeff::from_integer(w.weight));
    }
    for pc in &o.permutation_costs {
        let enc = registry
            .get(&pc.perm)
            .and_then(DeclaredVar::as_permutation)
            .ok_or_else(|| stage::<String>("objective")(format!("`{}` is not a permutation", pc.perm)))?;
        let costs: Vec<Vec<Coeff>> = pc.costs.iter().map(|r| r.iter().map(|&c| Coeff::from_integer(c)).collect()).collect();
        f += &enc.linear_assignment_objective(&costs);
    }
    Ok(f)
}

/// Encoding, objective construction, penalties, quadratization, QUBO,
/// Ising and spin Hamiltonian, in that order.
pub fn compile(spec: &ProblemSpec, flags: &CompileFlags) -> Result<CompileOutput, PipelineError> {
    spec.validate()?;
    let mut registry = VariableRegistry::new();
    let mut structural = Vec::new();
    for v in &spec.variables {
        match v {
            VariableDecl::Bool { name } => {
                registry.declare_bool(name).map_err(stage("encoding"))?;
            }
            VariableDecl::Int {
                name,
                lower,
                upper,
                bit_prefix,
            } => {
                let prefix = bit_prefix.clone().unwrap_or_else(|| format!("{name}."));
                registry
                    .declare_integer_with_prefix(name, *lower as i128, *upper as i128, &prefix)
                    .map_err(stage("encoding"))?;
            }
            VariableDecl::Categorical { name, levels } => {
                let enc = registry.declare_categorical(name, levels).map_err(stage("encoding"))?;
                structural.push(Constraint::eq(format!("onehot[{name}]"), enc.constraint()));
            }
            VariableDecl::Permutation { name, size } => {
                let enc = registry.declare_permutation(name, *size).map_err(stage("encoding"))?;
                for (j, h) in enc.row_constraints().into_iter().enumerate() {
                    structural.push(Constraint::eq(format!("perm[{name}].position{}", j + 1), h));
                }
                for (k, h) in enc.column_constraints().into_iter().enumerate() {
                    structural.push(Constraint::eq(format!("perm[{name}].value{}", k + 1), h));
                }
            }
        }
    }
    let objective = binarize_objective(spec, &registry)?;
    let minimized = match spec.sense {
        Sense::Min => objective.clone(),
        Sense::Max => -&objective,
    };
    let mut constraints = Vec::with_capacity(spec.constraints.len() + structural.len());
    for (i, c) in spec.constraints.iter().enumerate() {
        let h = c
            .polynomial
            .binarize(|name| registry.get(name).and_then(DeclaredVar::decode_polynomial))
            .map_err(|n| stage::<String>("constraints")(format!("unknown variable `{n}`")))?;
        let id = spec.constraint_id(i);
        constraints.push(match c.relation {
            Relation::Eq => Constraint::eq(id, h),
            Relation::Leq => Constraint::leq(id, h),
        });
    }
    constraints.extend(structural);
    let penalized = assemble(&minimized, &constraints, &mut registry, flags.penalty).map_err(stage("penalty"))?;
    let quadratization =
        quadratize(&penalized.assembled, flags.strategy, flags.rosenberg_penalty, &mut registry).map_err(stage("quadratize"))?;
    let order = registry.order().to_vec();
    let qubo = QuboModel::from_polynomial_with_order(&quadratization.output, &order).map_err(stage("qubo"))?;
    let ising = qubo_to_ising(&qubo).map_err(stage("ising"))?;
    let hamiltonian = ising_polynomial_from_pb(&penalized.assembled);
    let hamiltonian_variables = order.iter().filter(|v| registry.role(v) != Some(Role::Auxiliary)).cloned().collect();
    Ok(CompileOutput {
        metadata: Metadata {
            tool: "qubokit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format_version: crate::FORMAT_VERSION,
            flags: flags.clone(),
        },
        sense: spec.sense,
        registry,
        objective,
        penalized,
        quadratization,
        qubo,
        ising,
        hamiltonian,
        hamiltonian_variables,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Backend {
    Sa {
        reads: usize,
        seed: u64,
        schedule: AnnealSchedule,
    },
    Qaoa {
        layers: usize,
        shots: usize,
        budget: usize,
        seed: u64,
        /// Optimize on sampled means instead of exact expectations.
        shot_based: bool,
    },
    Brute,
}

impl Backend {
    fn name(&self) -> &'static str {
        match self {
            Backend::Sa { .. } => "sa",
            Backend::Qaoa { .. } => "qaoa",
            Backend::Brute => "brute",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaSummary {
    pub params: QaoaParams,
    pub expectation: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub format_version: u32,
    pub backend: Backend,
    pub variables: Vec<Var>,
    /// Sorted by energy, then bit string.
    pub samples: Vec<DecodedSample>,
    /// Lowest-energy feasible sample.
    pub best: Option<DecodedSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qaoa: Option<QaoaSummary>,
}

impl SolveReport {
    pub fn num_reads(&self) -> usize {
        self.samples.iter().map(|s| s.occurrences).sum()
    }

    /// Aligned text table: problem values, objective, energy, feasibility
    /// and occurrences.
    pub fn to_table(&self) -> String {
        let names: Vec<String> = self.samples.first().map(|s| s.values.keys().cloned().collect()).unwrap_or_default();
        let mut headers = names.clone();
        headers.extend(["objective", "energy", "feasible", "occurrences"].map(String::from));
        let rows: Vec<Vec<String>> = self
            .samples
            .iter()
            .map(|s| {
                let mut row: Vec<String> = names.iter().map(|n| s.values[n].to_string()).collect();
                row.push(s.objective.as_ref().map(format_coeff).unwrap_or_default());
                row.push(format_coeff(&s.energy));
                row.push(if s.feasible { "yes".into() } else { "no".into() });
                row.push(s.occurrences.to_string());
                row
            })
            .collect();
        crate::sampler::format_table(&headers, &rows)
    }
}

fn backend_err(b: &Backend, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Backend {
        backend: b.name(),
        message: e.to_string(),
    }
}

/// Runs `backend` on the compiled model and decodes its samples.
pub fn run_solve(out: &CompileOutput, backend: &Backend) -> Result<SolveReport, PipelineError> {
    let err = |e: &dyn std::fmt::Display| backend_err(backend, e);
    let mut summary = None;
    let set: SampleSet = match backend {
        Backend::Sa { reads, seed, schedule } => sample(&out.ising, *reads, *seed, schedule).map_err(|e| err(&e))?,
        Backend::Brute => brute_force_minimizers(&out.quadratization.output, out.order()).map_err(|e| err(&e))?,
        Backend::Qaoa {
            layers,
            shots,
            budget,
            seed,
            shot_based,
        } => {
            let q = Qaoa::new(&out.penalized.assembled, &out.hamiltonian_variables).map_err(|e| err(&e))?;
            let init = QaoaParams::constant(*layers, 0.1).map_err(|e| err(&e))?;
            let mode = if *shot_based {
                ExpectationMode::Shots { shots: *shots, seed: *seed }
            } else {
                ExpectationMode::Exact
            };
            let opt = q.optimize(&init, *budget, mode, &NelderMead::default()).map_err(|e| err(&e))?;
            let set = q.sample(&opt.params, *shots, *seed).map_err(|e| err(&e))?;
            summary = Some(QaoaSummary {
                expectation: q.energy(&opt.params).map_err(|e| err(&e))?,
                params: opt.params,
                evaluations: opt.evaluations,
            });
            set
        }
    };
    let constraints = out.constraints();
    let samples = decode_samples(&set, &out.registry, &constraints, Some(&out.objective)).map_err(|e| err(&e))?;
    let best = samples.iter().find(|s| s.feasible).cloned();
    Ok(SolveReport {
        format_version: crate::FORMAT_VERSION,
        backend: backend.clone(),
        variables: set.variables,
        samples,
        best,
        qaoa: summary,
    })
}
