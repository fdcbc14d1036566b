//! Browser bindings for qubokit. Each export takes problem text (JSON or
//! DIMACS CNF) and returns a JSON string for the page to render.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qubokit::dimacs::parse_dimacs_cnf;
use qubokit::pipeline::{compile, run_solve, Backend, CompileFlags, CompileOutput, Stage};
use qubokit::problem::{parse_problem, ProblemSpec};
use qubokit::qaoa::{Qaoa, QaoaParams};
use qubokit::quadratize::Strategy;
use qubokit::sampler::{bits_to_string, AnnealSchedule};

/// Keeps a landscape redraw interactive in the browser.
pub const MAX_DEMO_QUBITS: usize = 16;

fn problem(text: &str) -> Result<ProblemSpec, String> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    if first.starts_with('p') || first.starts_with('c') {
        let cnf = parse_dimacs_cnf(text, false).map_err(|e| format!("{e} [{}]", e.code()))?;
        Ok(ProblemSpec::from_cnf(&cnf, "x"))
    } else {
        parse_problem(text).map_err(|e| e.to_string())
    }
}

fn compiled(text: &str, strategy: &str) -> Result<CompileOutput, String> {
    let flags = CompileFlags {
        strategy: strategy.parse::<Strategy>()?,
        ..CompileFlags::default()
    };
    compile(&problem(text)?, &flags).map_err(|e| e.to_string())
}

fn qaoa(out: &CompileOutput) -> Result<Qaoa, String> {
    let n = out.hamiltonian_variables.len();
    if n > MAX_DEMO_QUBITS {
        return Err(format!("{n} qubits is too many for the demo (limit {MAX_DEMO_QUBITS})"));
    }
    Qaoa::new(&out.penalized.assembled, &out.hamiltonian_variables).map_err(|e| e.to_string())
}

pub fn compile_stage(text: &str, strategy: &str, stage: &str) -> Result<String, String> {
    let stage: Stage = stage.parse()?;
    let out = compiled(text, strategy)?;
    Ok(serde_json::to_string_pretty(&out.stage_json(stage)).expect("stage serializes"))
}

pub fn anneal_report(text: &str, reads: usize, seed: u64, sweeps: usize) -> Result<String, String> {
    let out = compiled(text, "rosenberg")?;
    let schedule = AnnealSchedule::new(0.1, 10.0, sweeps).map_err(|e| e.to_string())?;
    let report = run_solve(&out, &Backend::Sa { reads, seed, schedule }).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// `steps x steps` depth-1 energies, row-major in gamma, plus the exact
/// minimum of the cost for reference.
pub fn landscape_grid(text: &str, steps: usize, gamma_max: f64, beta_max: f64) -> Result<String, String> {
    let out = compiled(text, "rosenberg")?;
    let q = qaoa(&out)?;
    let energies = q.landscape((0.0, gamma_max), (0.0, beta_max), steps).map_err(|e| e.to_string())?;
    let minimum = q.diagonal().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(json!({
        "steps": steps,
        "gamma_max": gamma_max,
        "beta_max": beta_max,
        "energies": energies,
        "minimum": minimum,
        "variables": q.variables,
    })
    .to_string())
}

/// Exact basis-state probabilities and energies at one `(gamma, beta)`.
pub fn distribution_at(text: &str, gamma: f64, beta: f64) -> Result<String, String> {
    let out = compiled(text, "rosenberg")?;
    let q = qaoa(&out)?;
    let params = QaoaParams::new(vec![gamma], vec![beta]).map_err(|e| e.to_string())?;
    let sv = q.state(&params).map_err(|e| e.to_string())?;
    let states: Vec<_> = sv
        .probabilities()
        .iter()
        .enumerate()
        .map(|(w, p)| {
            json!({
                "bits": bits_to_string(&sv.index_bits(w)),
                "probability": p,
                "energy": q.diagonal()[w],
            })
        })
        .collect();
    Ok(json!({
        "expectation": sv.expectation_diagonal(q.diagonal()),
        "variables": q.variables,
        "states": states,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = compileProblem)]
pub fn compile_problem(text: &str, strategy: &str, stage: &str) -> Result<String, JsError> {
    js(compile_stage(text, strategy, stage))
}

#[wasm_bindgen]
pub fn anneal(text: &str, reads: usize, seed: u32, sweeps: usize) -> Result<String, JsError> {
    js(anneal_report(text, reads, seed as u64, sweeps))
}

#[wasm_bindgen(js_name = qaoaLandscape)]
pub fn qaoa_landscape(text: &str, steps: usize, gamma_max: f64, beta_max: f64) -> Result<String, JsError> {
    js(landscape_grid(text, steps, gamma_max, beta_max))
}

#[wasm_bindgen(js_name = qaoaDistribution)]
pub fn qaoa_distribution(text: &str, gamma: f64, beta: f64) -> Result<String, JsError> {
    js(distribution_at(text, gamma, beta))
}
