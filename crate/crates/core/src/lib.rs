//! Compile constrained combinatorial optimization problems into QUBO and
//! Ising form, then solve them with a simulated-annealing sampler or a
//! QAOA statevector simulator.
//!
//! The pipeline runs in stages, each a module:
//!
//! 1. [`encoding`]: binarize integer, categorical, and permutation
//!    variables; expand Iverson predicates and MAX-SAT clauses.
//! 2. [`penalty`]: fold constraints into the objective with slack
//!    variables and a penalty constant.
//! 3. [`quadratize`]: reduce degree ≥ 3 terms to quadratic form.
//! 4. [`ising`]: QUBO and Ising models, and spin-space coefficients.
//! 5. [`sampler`] and [`qaoa`]: solve.
//!
//! [`problem`], [`dimacs`] and [`pipeline`] glue the stages together for
//! file-driven use.

pub mod dimacs;
pub mod encoding;
pub mod ising;
pub mod optim;
pub mod penalty;
pub mod pipeline;
pub mod polynomial;
pub mod problem;
pub mod qaoa;
pub mod quadratize;
pub mod registry;
pub mod sampler;

pub use polynomial::{Assignment, Coeff, IntegerPolynomial, Monomial, Polynomial, Var};
pub use registry::VariableRegistry;

/// Version tag written into every emitted file.
pub const FORMAT_VERSION: u32 = 1;
