//! DIMACS CNF reader.
//!
//! Format: optional `c` comment lines, a `p cnf <vars> <clauses>` header,
//! then clauses as whitespace-separated nonzero literals, each terminated
//! by `0`. Clauses may span lines. A `%` line ends the clause section (as
//! in the SATLIB benchmark files).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{Clause, Literal};
use crate::polynomial::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header `{text}` (expected `p cnf <vars> <clauses>`)")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: missing `p cnf` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer literal")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} is outside 1..={max_var}")]
    LiteralOutOfRange { line: usize, literal: i64, max_var: u64 },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: last clause is not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("no header found")]
    NoHeader,
}

impl DimacsError {
    /// Stable short identifier for scripts and tests.
    pub fn code(&self) -> &'static str {
        match self {
            DimacsError::BadHeader { .. } => "bad-header",
            DimacsError::MissingHeader { .. } => "missing-header",
            DimacsError::DuplicateHeader { .. } => "duplicate-header",
            DimacsError::BadToken { .. } => "bad-token",
            DimacsError::LiteralOutOfRange { .. } => "literal-out-of-range",
            DimacsError::EmptyClause { .. } => "empty-clause",
            DimacsError::UnterminatedClause { .. } => "unterminated-clause",
            DimacsError::ClauseCountMismatch { .. } => "clause-count-mismatch",
            DimacsError::NoHeader => "no-header",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: u64,
    /// Signed 1-based variable indices.
    pub clauses: Vec<Vec<i64>>,
    /// Non-fatal problems (currently only a clause-count mismatch outside
    /// strict mode).
    pub warnings: Vec<String>,
}

impl Cnf {
    /// Variable `k` becomes `{prefix}{k}`.
    pub fn to_clauses(&self, prefix: &str) -> Vec<Clause> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal {
                        var: Var::new(format!("{prefix}{}", l.unsigned_abs())),
                        positive: l > 0,
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// `strict` turns a clause-count mismatch into an error.
pub fn parse_dimacs_cnf(text: &str, strict: bool) -> Result<Cnf, DimacsError> {
    let mut header: Option<(u64, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            let bad = || DimacsError::BadHeader { line, text: t.to_string() };
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad());
            }
            let v = parts[2].parse::<u64>().map_err(|_| bad())?;
            let c = parts[3].parse::<usize>().map_err(|_| bad())?;
            header = Some((v, c));
            continue;
        }
        let Some((max_var, _)) = header else {
            return Err(DimacsError::MissingHeader { line });
        };
        for tok in t.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > max_var {
                    return Err(DimacsError::LiteralOutOfRange { line, literal: lit, max_var });
                }
                current.push(lit);
            }
        }
        last_line = line;
    }
    let (num_vars, declared) = header.ok_or(DimacsError::NoHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: last_line });
    }
    let mut warnings = Vec::new();
    if declared != clauses.len() {
        let e = DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        };
        if strict {
            return Err(e);
        }
        warnings.push(e.to_string());
    }
    Ok(Cnf { num_vars, clauses, warnings })
}
