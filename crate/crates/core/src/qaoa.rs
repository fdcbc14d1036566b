//! QAOA: gate synthesis from a spin Hamiltonian, dense statevector
//! simulation, sampling and classical parameter optimization.
//!
//! Qubit `q` is the `q`-th variable of the chosen order. Basis index bits
//! are read with qubit 0 as the most significant bit, so the bit string of
//! an index lists `x1` first.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::{ising_polynomial_from_pb, IsingPolynomial};
use crate::optim::{Minimum, NelderMead};
use crate::polynomial::{coeff_to_f64, Assignment, Coeff, Monomial, Polynomial, Var};
use crate::sampler::SampleSet;

/// Largest simulated register.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QaoaError {
    #[error("{0} qubits exceed the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("gate touches qubit {qubit} but the circuit has {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("CNOT control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("gate angle {0} is not finite")]
    BadAngle(f64),
    #[error("gamma and beta need the same nonzero length (got {0} and {1})")]
    BadParams(usize, usize),
    #[error("variable {0} has no qubit in the given order")]
    UnknownVariable(Var),
    #[error("shots must be at least 1")]
    NoShots,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    H { qubit: usize },
    Rz { qubit: usize, theta: f64 },
    Rx { qubit: usize, theta: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H { qubit } | Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => (qubit, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn to_qasm(&self) -> String {
        match *self {
            Gate::H { qubit } => format!("h q[{qubit}];"),
            Gate::Rz { qubit, theta } => format!("rz({theta:?}) q[{qubit}];"),
            Gate::Rx { qubit, theta } => format!("rx({theta:?}) q[{qubit}];"),
            Gate::Cnot { control, target } => format!("cx q[{control}],q[{target}];"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateCircuit {
    pub num_qubits: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(num_qubits: usize) -> Self {
        GateCircuit { num_qubits, gates: Vec::new() }
    }

    pub fn from_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self, QaoaError> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<(), QaoaError> {
        let n = self.num_qubits;
        let (a, b) = g.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= n {
                return Err(QaoaError::QubitOutOfRange { qubit: q, n });
            }
        }
        if b == Some(a) {
            return Err(QaoaError::SameQubit(a));
        }
        if let Gate::Rz { theta, .. } | Gate::Rx { theta, .. } = g {
            if !theta.is_finite() {
                return Err(QaoaError::BadAngle(theta));
            }
        }
        self.gates.push(g);
        Ok(())
    }

    /// Appends `other`, which must not be wider than `self`.
    pub fn extend(&mut self, other: &GateCircuit) -> Result<(), QaoaError> {
        other.gates.iter().try_for_each(|g| self.push(*g))
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn to_qasm(&self) -> String {
        let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", self.num_qubits);
        for g in &self.gates {
            out.push_str(&g.to_qasm());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Result<Self, QaoaError> {
        if n > MAX_QUBITS {
            return Err(QaoaError::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Arbitrary amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QaoaError> {
        let n = amps.len().trailing_zeros() as usize;
        assert_eq!(1usize << n, amps.len(), "amplitude count must be a power of two");
        if n > MAX_QUBITS {
            return Err(QaoaError::TooManyQubits(n));
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    /// Bits of basis index `w`, qubit 0 first.
    pub fn index_bits(&self, w: usize) -> Vec<bool> {
        (0..self.n).map(|q| w & self.mask(q) != 0).collect()
    }

    pub fn apply(&mut self, g: &Gate) {
        let pairs = |mask: usize| (0..self.amps.len()).filter(move |i| i & mask == 0).map(move |i| (i, i | mask));
        match *g {
            Gate::H { qubit } => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for (i, j) in pairs(self.mask(qubit)).collect::<Vec<_>>() {
                    let (a, b) = (self.amps[i], self.amps[j]);
                    self.amps[i] = (a + b) * s;
                    self.amps[j] = (a - b) * s;
                }
            }
            Gate::Rz { qubit, theta } => {
                let m = self.mask(qubit);
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = Complex64::from_polar(1.0, theta / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & m == 0 { lo } else { hi };
                }
            }
            Gate::Rx { qubit, theta } => {
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(theta / 2.0).sin());
                for (i, j) in pairs(self.mask(qubit)).collect::<Vec<_>>() {
                    let (a, b) = (self.amps[i], self.amps[j]);
                    self.amps[i] = c * a + s * b;
                    self.amps[j] = s * a + c * b;
                }
            }
            Gate::Cnot { control, target } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
    }

    /// Exact `sum_w |a_w|^2 d_w` for a diagonal given per basis index.
    pub fn expectation_diagonal(&self, diagonal: &[f64]) -> f64 {
        self.amps.iter().zip(diagonal).map(|(a, d)| a.norm_sqr() * d).sum()
    }
}

/// Runs `c` on `|0...0>`.
pub fn simulate(c: &GateCircuit) -> Result<StateVector, QaoaError> {
    let mut sv = StateVector::zero(c.num_qubits)?;
    for g in c.gates() {
        sv.apply(g);
    }
    Ok(sv)
}

fn qubit_of(order: &[Var], v: &Var) -> Result<usize, QaoaError> {
    order.iter().position(|w| w == v).ok_or_else(|| QaoaError::UnknownVariable(v.clone()))
}

/// Terms in the given order; `e^{-i gamma a_S Z_S}` each. The constant term
/// is a global phase and emits nothing.
pub fn synthesize_phase_terms<'a, I>(terms: I, order: &[Var], gamma: f64) -> Result<GateCircuit, QaoaError>
where
    I: IntoIterator<Item = (&'a Monomial, &'a Coeff)>,
{
    let mut c = GateCircuit::new(order.len());
    for (m, a) in terms {
        if m.is_constant() {
            continue;
        }
        let mut qs = m.vars().iter().map(|v| qubit_of(order, v)).collect::<Result<Vec<_>, _>>()?;
        qs.sort_unstable();
        let theta = 2.0 * gamma * coeff_to_f64(a);
        let last = *qs.last().unwrap();
        for w in qs.windows(2) {
            c.push(Gate::Cnot { control: w[0], target: w[1] })?;
        }
        c.push(Gate::Rz { qubit: last, theta })?;
        for w in qs.windows(2).rev() {
            c.push(Gate::Cnot { control: w[0], target: w[1] })?;
        }
    }
    Ok(c)
}

/// `U(H_P, gamma)` with terms in canonical order.
pub fn synthesize_phase_circuit(hp: &IsingPolynomial, order: &[Var], gamma: f64) -> Result<GateCircuit, QaoaError> {
    synthesize_phase_terms(hp.terms(), order, gamma)
}

/// `RX(2 beta)` on every qubit.
pub fn synthesize_mixer(n: usize, beta: f64) -> GateCircuit {
    GateCircuit::from_gates(n, (0..n).map(|qubit| Gate::Rx { qubit, theta: 2.0 * beta }))
        .expect("mixer gates are in range")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(QaoaError::BadParams(gammas.len(), betas.len()));
        }
        Ok(QaoaParams { gammas, betas })
    }

    /// Every angle equal to `value`.
    pub fn constant(layers: usize, value: f64) -> Result<Self, QaoaError> {
        Self::new(vec![value; layers], vec![value; layers])
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(v: &[f64]) -> Result<Self, QaoaError> {
        let p = v.len() / 2;
        Self::new(v[..p].to_vec(), v[p..].to_vec())
    }
}

/// `H^n`, then `U(H_P, gamma_k)` and `U(H_M, beta_k)` for `k = 1..p`.
pub fn build_ansatz(hp: &IsingPolynomial, order: &[Var], params: &QaoaParams) -> Result<GateCircuit, QaoaError> {
    let n = order.len();
    let mut c = GateCircuit::from_gates(n, (0..n).map(|qubit| Gate::H { qubit }))?;
    for (g, b) in params.gammas.iter().zip(&params.betas) {
        c.extend(&synthesize_phase_circuit(hp, order, *g)?)?;
        c.extend(&synthesize_mixer(n, *b))?;
    }
    Ok(c)
}

/// `f(w)` for every basis index `w`.
pub fn diagonal(f: &Polynomial, order: &[Var]) -> Result<Vec<f64>, QaoaError> {
    let n = order.len();
    if n > MAX_QUBITS {
        return Err(QaoaError::TooManyQubits(n));
    }
    let mut terms = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let mut mask = 0usize;
        for v in m.vars() {
            mask |= 1 << (n - 1 - qubit_of(order, v)?);
        }
        terms.push((mask, coeff_to_f64(c)));
    }
    Ok((0..1usize << n)
        .map(|w| terms.iter().filter(|(m, _)| w & m == *m).map(|(_, c)| c).sum())
        .collect())
}

/// `<psi| H_P |psi>` with `H_P |x> = f(x) |x>`.
pub fn expectation(sv: &StateVector, f: &Polynomial, order: &[Var]) -> Result<f64, QaoaError> {
    Ok(sv.expectation_diagonal(&diagonal(f, order)?))
}

/// Draws `shots` basis states; energies are `f` evaluated exactly.
pub fn sample_counts(sv: &StateVector, shots: usize, seed: u64, f: &Polynomial, order: &[Var]) -> Result<SampleSet, QaoaError> {
    if shots == 0 {
        return Err(QaoaError::NoShots);
    }
    let mut cdf = Vec::with_capacity(sv.amps.len());
    let mut acc = 0.0;
    for p in sv.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<bool>> = (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let w = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            sv.index_bits(w)
        })
        .collect();
    Ok(SampleSet::from_samples(order.to_vec(), draws, |bits| {
        f.evaluate(&Assignment::from_bits(order, bits)).expect("order covers f")
    }))
}

/// Sample mean of the energy, weighted by occurrences.
pub fn sampled_mean(set: &SampleSet) -> f64 {
    let n = set.num_reads() as f64;
    set.records.iter().map(|r| coeff_to_f64(&r.energy) * r.occurrences as f64).sum::<f64>() / n
}

/// How the objective seen by the optimizer is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ExpectationMode {
    Exact,
    /// Evaluation `k` draws `shots` samples using seed `seed + k`.
    Shots { shots: usize, seed: u64 },
}

/// A problem ready for QAOA: qubit order, objective and its spin form.
#[derive(Clone, Debug)]
pub struct Qaoa {
    pub variables: Vec<Var>,
    pub objective: Polynomial,
    pub hamiltonian: IsingPolynomial,
    diagonal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaOptimization {
    pub params: QaoaParams,
    pub energy: f64,
    pub evaluations: usize,
    pub trace: Vec<crate::optim::TracePoint>,
}

impl Qaoa {
    /// Qubits follow `order`, which must cover the variables of `f`.
    pub fn new(f: &Polynomial, order: &[Var]) -> Result<Self, QaoaError> {
        let diagonal = diagonal(f, order)?;
        Ok(Qaoa {
            variables: order.to_vec(),
            objective: f.clone(),
            hamiltonian: ising_polynomial_from_pb(f),
            diagonal,
        })
    }

    /// Qubits in natural variable order.
    pub fn from_polynomial(f: &Polynomial) -> Result<Self, QaoaError> {
        let order: Vec<Var> = f.variables().into_iter().collect();
        Self::new(f, &order)
    }

    /// Cost of each basis state, indexed like the statevector.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn num_qubits(&self) -> usize {
        self.variables.len()
    }

    pub fn ansatz(&self, params: &QaoaParams) -> Result<GateCircuit, QaoaError> {
        build_ansatz(&self.hamiltonian, &self.variables, params)
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector, QaoaError> {
        simulate(&self.ansatz(params)?)
    }

    pub fn energy(&self, params: &QaoaParams) -> Result<f64, QaoaError> {
        Ok(self.state(params)?.expectation_diagonal(&self.diagonal))
    }

    pub fn sample(&self, params: &QaoaParams, shots: usize, seed: u64) -> Result<SampleSet, QaoaError> {
        sample_counts(&self.state(params)?, shots, seed, &self.objective, &self.variables)
    }

    /// Depth-1 energy on a `steps x steps` grid over `gammas` and `betas`,
    /// row-major in gamma.
    pub fn landscape(&self, gammas: (f64, f64), betas: (f64, f64), steps: usize) -> Result<Vec<f64>, QaoaError> {
        let at = |i: usize, (lo, hi): (f64, f64)| {
            if steps <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        };
        let cell = |k: usize| self.energy(&QaoaParams::new(vec![at(k / steps, gammas)], vec![at(k % steps, betas)])?);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..steps * steps).into_par_iter().map(cell).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..steps * steps).map(cell).collect()
        }
    }

    /// Nelder–Mead over `(gamma, beta)` from `initial`, spending at most
    /// `budget` evaluations. The result is the best point evaluated, so its
    /// estimate never exceeds that of `initial`.
    pub fn optimize(
        &self,
        initial: &QaoaParams,
        budget: usize,
        mode: ExpectationMode,
        method: &NelderMead,
    ) -> Result<QaoaOptimization, QaoaError> {
        let p = initial.layers();
        let mut calls = 0u64;
        let mut err = None;
        let objective = |x: &[f64]| -> f64 {
            let params = QaoaParams::new(x[..p].to_vec(), x[p..].to_vec()).expect("optimizer keeps the dimension");
            let k = calls;
            calls += 1;
            let r = match mode {
                ExpectationMode::Exact => self.energy(&params),
                ExpectationMode::Shots { shots, seed } => {
                    self.sample(&params, shots, seed.wrapping_add(k)).map(|s| sampled_mean(&s))
                }
            };
            r.unwrap_or_else(|e| {
                err = Some(e);
                f64::INFINITY
            })
        };
        let Minimum { point, value, evaluations, trace } = method.minimize(objective, &initial.to_vec(), budget);
        if let Some(e) = err {
            return Err(e);
        }
        Ok(QaoaOptimization {
            params: QaoaParams::from_slice(&point)?,
            energy: value,
            evaluations,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::tests::{integer_example, r, x};
    use std::f64::consts::PI;

    fn order(n: usize) -> Vec<Var> {
        (1..=n).map(|i| Var::new(format!("x{i}"))).collect()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn fig8_gate_sequence() {
        let hp = ising_polynomial_from_pb(&integer_example());
        let g = 0.3;
        let c = synthesize_phase_circuit(&hp, &order(3), g).unwrap();
        let expected = vec![
            Gate::Rz { qubit: 0, theta: -4.0 * g },
            Gate::Rz { qubit: 1, theta: -5.0 * g },
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cnot { control: 1, target: 2 },
            Gate::Rz { qubit: 2, theta: -9.0 * g },
            Gate::Cnot { control: 1, target: 2 },
            Gate::Cnot { control: 0, target: 1 },
        ];
        assert_eq!(c.gates(), expected.as_slice());
        let qasm = synthesize_phase_circuit(&hp, &order(3), 1.0).unwrap().to_qasm();
        assert!(qasm.contains("rz(-4.0) q[0];\nrz(-5.0) q[1];\ncx q[0],q[1];"));
    }

    #[test]
    fn basic_gates() {
        let hc = GateCircuit::from_gates(1, [Gate::H { qubit: 0 }]).unwrap();
        let sv = simulate(&hc).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(sv.amps[0], Complex64::new(s, 0.0)) && close(sv.amps[1], Complex64::new(s, 0.0)));

        let mut sv = StateVector::zero(2).unwrap();
        sv.apply(&Gate::Rx { qubit: 0, theta: PI });
        sv.apply(&Gate::Cnot { control: 0, target: 1 });
        // |10> -> |11>, up to the -i from RX(pi)
        assert!(close(sv.amps[0b11], Complex64::new(0.0, -1.0)));

        let mut sv = StateVector::zero(1).unwrap();
        sv.apply(&Gate::Rx { qubit: 0, theta: PI });
        assert!(close(sv.amps[1], Complex64::new(0.0, -1.0)));
        let before = sv.probabilities();
        sv.apply(&Gate::Rz { qubit: 0, theta: 1.3 });
        assert_eq!(sv.probabilities(), before);

        let m = synthesize_mixer(3, 0.0);
        assert_eq!(m.len(), 3);
        let mut sv = StateVector::zero(3).unwrap();
        for g in m.gates() {
            sv.apply(g);
        }
        assert!(close(sv.amps[0], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn circuit_validation() {
        let mut c = GateCircuit::new(2);
        assert_eq!(c.push(Gate::H { qubit: 2 }), Err(QaoaError::QubitOutOfRange { qubit: 2, n: 2 }));
        assert_eq!(c.push(Gate::Cnot { control: 1, target: 1 }), Err(QaoaError::SameQubit(1)));
        assert!(c.push(Gate::Rz { qubit: 0, theta: f64::NAN }).is_err());
        assert!(StateVector::zero(25).is_err());
        let json = serde_json::to_string(&build_ansatz(&ising_polynomial_from_pb(&integer_example()), &order(3), &QaoaParams::constant(1, 0.1).unwrap()).unwrap()).unwrap();
        assert!(json.contains(r#"{"gate":"cnot","control":0,"target":1}"#));
        let back: GateCircuit = serde_json::from_str(&json).unwrap();
        assert_eq!(back.len(), 3 + 7 + 3);
    }

    #[test]
    fn zero_angles_give_uniform_state() {
        let q = Qaoa::new(&integer_example(), &order(3)).unwrap();
        let p = QaoaParams::constant(1, 0.0).unwrap();
        let sv = q.state(&p).unwrap();
        assert!(sv.probabilities().iter().all(|p| (p - 0.125).abs() < 1e-12));
        assert!(q.energy(&p).unwrap().abs() < 1e-12);
        let basis = StateVector::zero(3).unwrap();
        assert_eq!(expectation(&basis, &integer_example(), &order(3)).unwrap(), -9.0);
        let c = Polynomial::constant(r(7, 2));
        assert!((expectation(&sv, &c, &order(3)).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn two_layer_gate_count() {
        let hp = ising_polynomial_from_pb(&integer_example());
        let c = build_ansatz(&hp, &order(3), &QaoaParams::constant(2, 0.2).unwrap()).unwrap();
        assert_eq!(c.len(), 3 + 2 * (7 + 3));
    }

    #[test]
    fn sampling_counts() {
        let basis = StateVector::zero(2).unwrap();
        let set = sample_counts(&basis, 100, 3, &Polynomial::zero(), &order(2)).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].occurrences, 100);
        let q = Qaoa::new(&integer_example(), &order(3)).unwrap();
        let set = q.sample(&QaoaParams::constant(1, 0.0).unwrap(), 8000, 11).unwrap();
        assert_eq!(set.records.len(), 8);
        assert!(set.records.iter().all(|r| (850..=1150).contains(&r.occurrences)));
        assert_eq!(set, q.sample(&QaoaParams::constant(1, 0.0).unwrap(), 8000, 11).unwrap());
    }

    #[test]
    fn single_qubit_optimization_beats_uniform() {
        let q = Qaoa::new(&x(1), &order(1)).unwrap();
        let init = QaoaParams::constant(1, 0.1).unwrap();
        let out = q.optimize(&init, 1, ExpectationMode::Exact, &NelderMead::default()).unwrap();
        assert_eq!(out.params, init);
        let out = q.optimize(&init, 60, ExpectationMode::Exact, &NelderMead::default()).unwrap();
        assert!(out.energy < 0.5 - 0.1, "{}", out.energy);
        let grid = q.landscape((-PI, PI), (-PI, PI), 32).unwrap();
        let best = grid.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(best < 0.1);
    }

    #[test]
    fn shot_mode_is_deterministic() {
        let q = Qaoa::new(&integer_example(), &order(3)).unwrap();
        let init = QaoaParams::constant(1, 0.1).unwrap();
        let mode = ExpectationMode::Shots { shots: 200, seed: 5 };
        let a = q.optimize(&init, 30, mode, &NelderMead::default()).unwrap();
        let b = q.optimize(&init, 30, mode, &NelderMead::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.energy <= a.trace[0].value);
    }
}
