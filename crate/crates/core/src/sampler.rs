//! Simulated annealing over Ising models, exhaustive enumeration, and the
//! aggregated sample sets both produce.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::IsingModel;
use crate::penalty::Constraint;
use crate::polynomial::{common_denominator, format_coeff, Assignment, Coeff, Polynomial, PolynomialError, Var};
use crate::registry::{Value, VariableRegistry};

/// Largest variable count accepted by exhaustive search.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;
/// Largest variable count for which the full spectrum is materialized.
pub const MAX_SPECTRUM_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("{got} variables exceed the exhaustive-search limit of {limit}")]
    TooManyVariables { got: usize, limit: usize },
    #[error("number of reads must be at least 1")]
    NoReads,
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Polynomial(#[from] PolynomialError),
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn string_to_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// One character per variable, in the set's variable order.
    #[serde(with = "bitstring")]
    pub bits: Vec<bool>,
    #[serde(with = "crate::polynomial::coeff_str")]
    pub energy: Coeff,
    pub occurrences: usize,
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::bits_to_string(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let s = String::deserialize(d)?;
        super::string_to_bits(&s).ok_or_else(|| serde::de::Error::custom(format!("bad bit string `{s}`")))
    }
}

impl SampleRecord {
    pub fn assignment(&self, variables: &[Var]) -> Assignment {
        Assignment::from_bits(variables, &self.bits)
    }
}

/// Distinct assignments with exact energies, sorted by energy and then by
/// bit string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub format_version: u32,
    pub variables: Vec<Var>,
    pub records: Vec<SampleRecord>,
}

impl SampleSet {
    /// Aggregates raw samples, computing each distinct energy once.
    pub fn from_samples<I, F>(variables: Vec<Var>, samples: I, mut energy: F) -> Self
    where
        I: IntoIterator<Item = Vec<bool>>,
        F: FnMut(&[bool]) -> Coeff,
    {
        let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for s in samples {
            *counts.entry(s).or_default() += 1;
        }
        let records = counts
            .into_iter()
            .map(|(bits, occurrences)| SampleRecord {
                energy: energy(&bits),
                bits,
                occurrences,
            })
            .collect();
        Self::from_records(variables, records)
    }

    pub fn from_records(variables: Vec<Var>, mut records: Vec<SampleRecord>) -> Self {
        records.sort_by(|a, b| a.energy.cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)));
        SampleSet {
            format_version: crate::FORMAT_VERSION,
            variables,
            records,
        }
    }

    pub fn num_reads(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    pub fn lowest_energy(&self) -> Option<Coeff> {
        self.records.first().map(|r| r.energy)
    }

    /// Records sharing the lowest energy.
    pub fn ground_states(&self) -> &[SampleRecord] {
        match self.lowest_energy() {
            Some(e) => {
                let k = self.records.iter().take_while(|r| r.energy == e).count();
                &self.records[..k]
            }
            None => &[],
        }
    }

    /// Reads whose energy equals `e`.
    pub fn occurrences_at(&self, e: Coeff) -> usize {
        self.records.iter().filter(|r| r.energy == e).map(|r| r.occurrences).sum()
    }

    /// Record with the most occurrences (lowest energy on ties).
    pub fn modal(&self) -> Option<&SampleRecord> {
        self.records.iter().rev().max_by_key(|r| r.occurrences)
    }

    /// Aligned table: one column per variable, then energy and occurrences.
    pub fn to_table(&self) -> String {
        let mut headers: Vec<String> = self.variables.iter().map(|v| v.name().to_string()).collect();
        headers.push("energy".into());
        headers.push("occurrences".into());
        let rows: Vec<Vec<String>> = self
            .records
            .iter()
            .map(|r| {
                let mut row: Vec<String> = r.bits.iter().map(|&b| u8::from(b).to_string()).collect();
                row.push(format_coeff(&r.energy));
                row.push(r.occurrences.to_string());
                row
            })
            .collect();
        format_table(&headers, &rows)
    }
}

/// Right-aligned columns separated by two spaces.
pub fn format_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(headers);
    for row in rows {
        line(row);
    }
    out
}

/// Geometric inverse-temperature ramp from `beta_start` to `beta_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    beta_start: f64,
    beta_end: f64,
    sweeps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            beta_start: 0.1,
            beta_end: 10.0,
            sweeps: 256,
        }
    }
}

impl AnnealSchedule {
    pub fn new(beta_start: f64, beta_end: f64, sweeps: usize) -> Result<Self, SamplerError> {
        if !(beta_start.is_finite() && beta_end.is_finite() && 0.0 < beta_start && beta_start < beta_end) {
            return Err(SamplerError::Schedule(format!(
                "need 0 < beta_start < beta_end, got {beta_start} and {beta_end}"
            )));
        }
        if sweeps == 0 {
            return Err(SamplerError::Schedule("sweeps must be at least 1".into()));
        }
        Ok(AnnealSchedule { beta_start, beta_end, sweeps })
    }

    pub fn beta_start(&self) -> f64 {
        self.beta_start
    }

    pub fn beta_end(&self) -> f64 {
        self.beta_end
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).powf(1.0 / (self.sweeps - 1) as f64);
        (0..self.sweeps).map(|k| self.beta_start * ratio.powi(k as i32)).collect()
    }
}

fn anneal_one(model: &crate::ising::DenseIsing, betas: &[f64], seed: u64, read: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read);
    let mut s: Vec<i8> = (0..model.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    for &beta in betas {
        for j in 0..model.n {
            let delta = model.flip_delta(&s, j);
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                s[j] = -s[j];
            }
        }
    }
    s.into_iter().map(|v| v < 0).collect()
}

/// Independent Metropolis annealing runs. Read `k` uses its own ChaCha
/// stream `k` under `seed`, so the result does not depend on how reads are
/// scheduled across threads. Energies are re-evaluated exactly.
pub fn sample(model: &IsingModel, num_reads: usize, seed: u64, schedule: &AnnealSchedule) -> Result<SampleSet, SamplerError> {
    if num_reads == 0 {
        return Err(SamplerError::NoReads);
    }
    let dense = model.to_dense();
    let betas = schedule.betas();
    let run = |k: usize| anneal_one(&dense, &betas, seed, k as u64);
    #[cfg(feature = "parallel")]
    let samples: Vec<Vec<bool>> = {
        use rayon::prelude::*;
        (0..num_reads).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<Vec<bool>> = (0..num_reads).map(run).collect();
    Ok(SampleSet::from_samples(model.variables.clone(), samples, |b| model.evaluate_bits(b)))
}

/// `f` scaled to integer coefficients, with per-variable term lists for
/// incremental evaluation.
struct Enumerator {
    scale: i128,
    terms: Vec<(Vec<usize>, i128)>,
    by_var: Vec<Vec<usize>>,
    constant: i128,
}

impl Enumerator {
    fn new(f: &Polynomial, order: &[Var]) -> Result<Self, SamplerError> {
        let index: BTreeMap<&Var, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let scale = common_denominator(f.terms().map(|(_, c)| c));
        let mut terms = Vec::new();
        let mut by_var = vec![Vec::new(); order.len()];
        let mut constant = 0;
        for (m, c) in f.terms() {
            let c = (*c * Coeff::from_integer(scale)).to_integer();
            if m.is_constant() {
                constant = c;
                continue;
            }
            let mut idx = Vec::with_capacity(m.degree());
            for v in m.vars() {
                let i = *index.get(v).ok_or_else(|| PolynomialError::MissingVariable(v.clone()))?;
                idx.push(i);
                by_var[i].push(terms.len());
            }
            terms.push((idx, c));
        }
        Ok(Enumerator { scale, terms, by_var, constant })
    }

    /// Calls `visit(bits, scaled value)` for every assignment in Gray-code
    /// order.
    fn run(&self, n: usize, mut visit: impl FnMut(&[bool], i128)) {
        let mut bits = vec![false; n];
        let mut value = self.constant;
        visit(&bits, value);
        for step in 1u64..1 << n {
            let j = step.trailing_zeros() as usize;
            let mut delta = 0;
            for &t in &self.by_var[j] {
                let (idx, c) = &self.terms[t];
                if idx.iter().all(|&i| i == j || bits[i]) {
                    delta += c;
                }
            }
            if bits[j] {
                value -= delta;
            } else {
                value += delta;
            }
            bits[j] = !bits[j];
            visit(&bits, value);
        }
    }
}

fn guard(n: usize, limit: usize) -> Result<(), SamplerError> {
    if n > limit {
        return Err(SamplerError::TooManyVariables { got: n, limit });
    }
    Ok(())
}

/// Every assignment of `order`, one occurrence each.
pub fn brute_force(f: &Polynomial, order: &[Var]) -> Result<SampleSet, SamplerError> {
    guard(order.len(), MAX_SPECTRUM_VARS)?;
    let e = Enumerator::new(f, order)?;
    let mut records = Vec::with_capacity(1 << order.len());
    e.run(order.len(), |bits, v| {
        records.push(SampleRecord {
            bits: bits.to_vec(),
            energy: Coeff::new(v, e.scale),
            occurrences: 1,
        })
    });
    Ok(SampleSet::from_records(order.to_vec(), records))
}

/// Only the minimizing assignments, one occurrence each.
pub fn brute_force_minimizers(f: &Polynomial, order: &[Var]) -> Result<SampleSet, SamplerError> {
    guard(order.len(), MAX_BRUTE_FORCE_VARS)?;
    let e = Enumerator::new(f, order)?;
    let mut best = i128::MAX;
    let mut argmin: Vec<Vec<bool>> = Vec::new();
    e.run(order.len(), |bits, v| {
        if v < best {
            best = v;
            argmin.clear();
        }
        if v == best {
            argmin.push(bits.to_vec());
        }
    });
    let energy = Coeff::new(best, e.scale);
    let records = argmin
        .into_iter()
        .map(|bits| SampleRecord { bits, energy, occurrences: 1 })
        .collect();
    Ok(SampleSet::from_records(order.to_vec(), records))
}

/// The Ising model as a polynomial over bits, in the model's order.
pub fn model_polynomial(model: &IsingModel) -> Polynomial {
    crate::ising::ising_to_qubo(model).to_polynomial()
}

/// Problem-level view of one sample record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedSample {
    #[serde(with = "bitstring")]
    pub bits: Vec<bool>,
    pub values: BTreeMap<String, Value>,
    pub feasible: bool,
    /// Violated constraint ids.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violated: Vec<String>,
    /// Original objective at this point, when one is supplied.
    #[serde(with = "opt_coeff", skip_serializing_if = "Option::is_none", default)]
    pub objective: Option<Coeff>,
    #[serde(with = "crate::polynomial::coeff_str")]
    pub energy: Coeff,
    pub occurrences: usize,
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

/// Decodes each record through `registry`, dropping slack and auxiliary
/// bits, and checks `constraints` on the decoded point.
pub fn decode_samples(
    set: &SampleSet,
    registry: &VariableRegistry,
    constraints: &[Constraint],
    objective: Option<&Polynomial>,
) -> Result<Vec<DecodedSample>, SamplerError> {
    set.records
        .iter()
        .map(|r| {
            let x = r.assignment(&set.variables);
            let mut violated = Vec::new();
            for c in constraints {
                if !c.is_satisfied(&x)? {
                    violated.push(c.id.clone());
                }
            }
            Ok(DecodedSample {
                bits: r.bits.clone(),
                values: registry.decode(&x)?,
                feasible: violated.is_empty(),
                violated,
                objective: objective.map(|f| f.evaluate(&x)).transpose()?,
                energy: r.energy,
                occurrences: r.occurrences,
            })
        })
        .collect()
}

/// Convenience for tests and reports: the minimizers of `f` projected onto
/// `onto`.
pub fn projected_argmin(set: &SampleSet, onto: &[Var]) -> std::collections::BTreeSet<Vec<bool>> {
    let pos: Vec<usize> = onto
        .iter()
        .map(|v| set.variables.iter().position(|w| w == v).expect("projection variable present"))
        .collect();
    set.ground_states().iter().map(|r| pos.iter().map(|&i| r.bits[i]).collect()).collect()
}
