use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qubokit::dimacs::parse_dimacs_cnf;
use qubokit::penalty::Relation;
use qubokit::pipeline::{compile, run_solve, Backend, CompileFlags, CompileOutput, PipelineError, SolveReport, Stage};
use qubokit::polynomial::{format_coeff, parse_coeff, Coeff};
use qubokit::problem::{parse_problem, ProblemError, ProblemSpec};
use qubokit::quadratize::Strategy;
use qubokit::registry::DeclaredVar;
use qubokit::sampler::AnnealSchedule;

#[derive(Parser)]
#[command(name = "qubokit", version, about = "Compile constrained pseudo-Boolean problems to QUBO/Ising form and solve them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem and print one stage (or all of them) as JSON.
    Compile {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: FlagArgs,
        #[arg(long, default_value = "all", value_parser = parse_stage)]
        emit: Stage,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile, then sample with a backend.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: FlagArgs,
        #[arg(long, value_enum, default_value_t = BackendKind::Sa)]
        backend: BackendKind,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively list the minimizers of the quadratized problem.
    BruteForce {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: FlagArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Human-readable summary of the compilation stages.
    Inspect {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: FlagArgs,
        #[arg(long, default_value = "all", value_parser = parse_stage)]
        stage: Stage,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Problem file: JSON, or DIMACS CNF (detected from a `.cnf` extension
    /// or a leading `c`/`p` line).
    input: PathBuf,
    /// Treat the input as DIMACS CNF regardless of its name.
    #[arg(long)]
    dimacs: bool,
    /// Reject a DIMACS clause count that disagrees with the header.
    #[arg(long)]
    strict: bool,
    /// Variable name prefix for DIMACS inputs.
    #[arg(long, default_value = "x")]
    cnf_prefix: String,
}

#[derive(Args)]
struct FlagArgs {
    #[arg(long, default_value = "rosenberg", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Constraint penalty constant: a rational such as `12` or `7/2`, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_penalty)]
    penalty: Penalty,
    /// Rosenberg gadget constant, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_penalty)]
    rosenberg_penalty: Penalty,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Annealing reads.
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 256)]
    sweeps: usize,
    #[arg(long, default_value_t = 0.1)]
    beta_start: f64,
    #[arg(long, default_value_t = 10.0)]
    beta_end: f64,
    /// QAOA depth p.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// QAOA measurement shots.
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    /// QAOA optimizer evaluation budget.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    /// Optimize QAOA angles on sampled means instead of exact expectations.
    #[arg(long)]
    shot_based: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Sa,
    Qaoa,
    Brute,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone)]
struct Penalty(Option<Coeff>);

fn parse_penalty(s: &str) -> Result<Penalty, String> {
    if s == "auto" {
        return Ok(Penalty(None));
    }
    parse_coeff(s).map(|c| Penalty(Some(c))).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse()
}

/// An error and its exit status.
struct Failure(i32, String);

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

fn looks_like_dimacs(path: &Path, text: &str) -> bool {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("cnf")) {
        return true;
    }
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    first.is_some_and(|l| l.starts_with("p ") || l == "c" || l.starts_with("c "))
}

fn load(input: &InputArgs) -> Result<ProblemSpec, Failure> {
    let text = fs::read_to_string(&input.input).map_err(|e| Failure(2, format!("{}: {e}", input.input.display())))?;
    if input.dimacs || looks_like_dimacs(&input.input, &text) {
        let cnf = parse_dimacs_cnf(&text, input.strict)
            .map_err(|e| Failure(2, format!("{}: {e} [{}]", input.input.display(), e.code())))?;
        for w in &cnf.warnings {
            eprintln!("warning: {w}");
        }
        Ok(ProblemSpec::from_cnf(&cnf, &input.cnf_prefix))
    } else {
        parse_problem(&text).map_err(|e: ProblemError| Failure(2, format!("{}: {e}", input.input.display())))
    }
}

fn build(input: &InputArgs, flags: &FlagArgs) -> Result<CompileOutput, Failure> {
    let spec = load(input)?;
    let flags = CompileFlags {
        strategy: flags.strategy,
        penalty: flags.penalty.0,
        rosenberg_penalty: flags.rosenberg_penalty.0,
    };
    Ok(compile(&spec, &flags)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure(1, format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure(1, e.to_string()))
        }
    }
}

fn render_report(report: &SolveReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Table => {
            let mut s = report.to_table();
            if let Some(q) = &report.qaoa {
                s.push_str(&format!(
                    "\nqaoa: gammas {:?} betas {:?} expectation {:.6} after {} evaluations\n",
                    q.params.gammas, q.params.betas, q.expectation, q.evaluations
                ));
            }
            match &report.best {
                Some(b) => {
                    let vals: Vec<String> = b.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    s.push_str(&format!("best: {}", vals.join(" ")));
                    if let Some(o) = &b.objective {
                        s.push_str(&format!(" objective={}", format_coeff(o)));
                    }
                    s.push('\n');
                }
                None => s.push_str("best: no feasible sample\n"),
            }
            s
        }
    }
}

fn inspect(out: &CompileOutput, stage: Stage) -> String {
    let all = stage == Stage::All;
    let mut s = String::new();
    if all || stage == Stage::Registry {
        s.push_str("== registry\n");
        for d in out.registry.declared() {
            let bits: Vec<String> = d.binary_vars().iter().map(ToString::to_string).collect();
            let kind = match d {
                DeclaredVar::Bool { .. } => "bool".to_string(),
                DeclaredVar::Integer(e) => format!("int [{}, {}]", e.lower, e.upper),
                DeclaredVar::Categorical(e) => format!("categorical ({} levels)", e.levels.len()),
                DeclaredVar::Permutation(e) => format!("permutation of {}", e.size),
            };
            s.push_str(&format!("{} : {kind} -> {}\n", d.name(), bits.join(" ")));
            if let Some(p) = d.decode_polynomial() {
                if !matches!(d, DeclaredVar::Bool { .. }) {
                    s.push_str(&format!("  {} = {p}\n", d.name()));
                }
            }
        }
        for sl in out.registry.slacks() {
            let bits: Vec<String> = sl.encoding.bits.iter().map(ToString::to_string).collect();
            s.push_str(&format!(
                "slack for {} : [{}, {}] -> {}\n",
                sl.constraint,
                sl.encoding.lower,
                sl.encoding.upper,
                bits.join(" ")
            ));
        }
        let aux: Vec<String> = out.registry.auxiliaries().iter().map(ToString::to_string).collect();
        if !aux.is_empty() {
            s.push_str(&format!("auxiliary: {}\n", aux.join(" ")));
        }
    }
    if all || stage == Stage::Objective {
        s.push_str(&format!("== objective ({})\n{}\n", sense_name(out), out.objective));
    }
    if all || stage == Stage::Penalized {
        s.push_str(&format!("== penalized (P = {})\n", format_coeff(&out.penalized.penalty_constant)));
        for c in out.penalized.constraints() {
            let rel = match c.relation {
                Relation::Eq => "==",
                Relation::Leq => "<=",
            };
            s.push_str(&format!("{} : {} {rel} 0\n", c.id, c.h));
        }
        s.push_str(&format!("{}\n", out.penalized.assembled));
    }
    if all || stage == Stage::Quadratization {
        let q = &out.quadratization;
        s.push_str(&format!("== quadratization ({:?})\n", q.strategy).to_lowercase());
        for sub in &q.substitutions {
            s.push_str(&format!(
                "{} = {} {} (P = {})\n",
                sub.aux,
                sub.left,
                sub.right,
                format_coeff(&sub.penalty_constant)
            ));
        }
        for l in &q.local {
            s.push_str(&format!("{} {} -> {}\n", format_coeff(&l.coef), l.monomial, l.aux));
        }
        s.push_str(&format!("{}\n", q.output));
    }
    if all || stage == Stage::Qubo {
        s.push_str(&format!("== qubo (constant {})\n", format_coeff(&out.qubo.constant)));
        s.push_str(&matrix_table(
            &out.qubo.variables.iter().map(ToString::to_string).collect::<Vec<_>>(),
            &out.qubo.q.iter().map(|r| r.iter().map(format_coeff).collect()).collect::<Vec<_>>(),
        ));
    }
    if all || stage == Stage::Ising {
        let m = &out.ising;
        s.push_str(&format!("== ising (offset {})\n", format_coeff(&m.offset)));
        let names: Vec<String> = m.variables.iter().map(ToString::to_string).collect();
        let h: Vec<String> = names.iter().zip(&m.h).map(|(n, h)| format!("{n}:{}", format_coeff(h))).collect();
        s.push_str(&format!("h  {}\n", h.join(" ")));
        s.push_str(&matrix_table(
            &names,
            &m.j.iter().map(|r| r.iter().map(format_coeff).collect()).collect::<Vec<_>>(),
        ));
    }
    if all || stage == Stage::Hamiltonian {
        s.push_str(&format!("== hamiltonian\n{}\n", out.hamiltonian));
    }
    s
}

fn sense_name(out: &CompileOutput) -> &'static str {
    match out.sense {
        qubokit::problem::Sense::Min => "min",
        qubokit::problem::Sense::Max => "max",
    }
}

fn matrix_table(names: &[String], rows: &[Vec<String>]) -> String {
    let mut headers = vec![String::new()];
    headers.extend(names.iter().cloned());
    let body: Vec<Vec<String>> = names
        .iter()
        .zip(rows)
        .map(|(n, r)| std::iter::once(n.clone()).chain(r.iter().cloned()).collect())
        .collect();
    qubokit::sampler::format_table(&headers, &body)
}

fn solve(out: &CompileOutput, backend: BackendKind, a: &SolverArgs) -> Result<SolveReport, Failure> {
    let backend = match backend {
        BackendKind::Sa => Backend::Sa {
            reads: a.reads,
            seed: a.seed,
            schedule: AnnealSchedule::new(a.beta_start, a.beta_end, a.sweeps).map_err(|e| Failure(4, format!("sa: {e}")))?,
        },
        BackendKind::Qaoa => Backend::Qaoa {
            layers: a.layers,
            shots: a.shots,
            budget: a.budget,
            seed: a.seed,
            shot_based: a.shot_based,
        },
        BackendKind::Brute => Backend::Brute,
    };
    Ok(run_solve(out, &backend)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile {
            input,
            flags,
            emit: stage,
            output,
        } => {
            let out = build(&input, &flags)?;
            let json = serde_json::to_string_pretty(&out.stage_json(stage)).expect("stage serializes") + "\n";
            emit(output.as_deref(), &json)
        }
        Command::Solve {
            input,
            flags,
            backend,
            solver,
            format,
            output,
        } => {
            let out = build(&input, &flags)?;
            let report = solve(&out, backend, &solver)?;
            emit(output.as_deref(), &render_report(&report, format))
        }
        Command::BruteForce {
            input,
            flags,
            format,
            output,
        } => {
            let out = build(&input, &flags)?;
            let report = run_solve(&out, &Backend::Brute)?;
            emit(output.as_deref(), &render_report(&report, format))
        }
        Command::Inspect { input, flags, stage } => {
            let out = build(&input, &flags)?;
            emit(None, &inspect(&out, stage))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
