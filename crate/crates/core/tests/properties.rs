mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{arb_poly, arb_rational_poly, argmin, eval, patterns, projected_argmin, r, xs};
use qubokit::encoding::{encode_integer, expand_iverson, maxsat_objective, IversonExpr, Literal};
use qubokit::ising::{ising_polynomial_from_pb, ising_to_qubo, qubo_to_ising, IsingModel, IsingPolynomial, QuboModel};
use qubokit::penalty::{assemble, penalty_constant, Constraint};
use qubokit::pipeline::{compile, CompileFlags};
use qubokit::problem::{
    parse_problem, print_problem, ConstraintSpec, Objective, PermutationCost, ProblemSpec, Sense, VariableDecl,
    WeightedPredicate,
};
use qubokit::qaoa::{
    build_ansatz, sample_counts, simulate, synthesize_phase_circuit, synthesize_phase_terms, Qaoa, QaoaParams, StateVector,
};
use qubokit::quadratize::{negative_monomial_quadratize, quadratize, rosenberg_gadget, rosenberg_quadratize, Strategy};
use qubokit::sampler::{brute_force, sample, AnnealSchedule};
use qubokit::{Assignment, Coeff, IntegerPolynomial, Monomial, Polynomial, Var, VariableRegistry};

fn is_canonical(p: &Polynomial) -> bool {
    p.terms().all(|(m, c)| *c != r(0, 1) && m.vars().windows(2).all(|w| w[0] < w[1]))
}

fn to_f64(c: &Coeff) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws(a in arb_poly(6, 3, 9, 6), b in arb_poly(6, 3, 9, 6), c in arb_poly(6, 3, 9, 6)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Polynomial::zero());
        prop_assert!(is_canonical(&(&a * &b)) && is_canonical(&(&a + &c)) && is_canonical(&(&a - &b)));
    }

    #[test]
    fn multilinear_reduction(a in arb_poly(4, 3, 5, 5)) {
        // x^2 = x on {0,1}, so squaring a monomial changes nothing
        for (m, _) in a.terms() {
            let t = Polynomial::term(m.vars().to_vec(), 1);
            prop_assert_eq!(&t * &t, t);
        }
        prop_assert!(a.degree() <= 4);
    }

    #[test]
    fn substitute_then_evaluate(p in arb_poly(5, 3, 9, 6), rep in arb_poly(5, 2, 2, 3), v in 1usize..=5, w in 0u32..32) {
        let var = Var::new(format!("x{v}"));
        let vars = xs(5);
        let bits: Vec<bool> = (0..5).map(|j| w >> j & 1 == 1).collect();
        let x = Assignment::from_bits(&vars, &bits);
        let rv = rep.evaluate(&x).unwrap();
        prop_assume!(rv == r(0, 1) || rv == r(1, 1));
        let mut extended = x.clone();
        extended.set(var.clone(), rv == r(1, 1));
        let sub = p.substitute(&var, &rep);
        prop_assert!(is_canonical(&sub));
        prop_assert_eq!(sub.evaluate(&x).unwrap(), p.evaluate(&extended).unwrap());
    }

    #[test]
    fn bounds_are_sound(p in arb_rational_poly(10, 3, 8)) {
        let vars = xs(10);
        let (lo, hi) = (p.lower_bound(), p.upper_bound());
        for bits in patterns(10) {
            let v = eval(&p, &vars, &bits);
            prop_assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn polynomial_json_roundtrip(p in arb_rational_poly(6, 4, 8)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn integer_encoding_is_onto_its_domain(a in -20i128..20, width in 0i128..=64) {
        let c = a + width;
        let e = encode_integer("z", "x", a, c).unwrap();
        let mut seen = BTreeSet::new();
        for bits in patterns(e.num_bits()) {
            let z = e.decode(&Assignment::from_bits(&e.bits, &bits)).unwrap();
            prop_assert!((a..=c).contains(&z));
            seen.insert(z);
        }
        prop_assert_eq!(seen.len() as i128, width + 1);
    }

    #[test]
    fn binarization_commutes_with_decoding(
        (a1, w1, a2, w2) in (-4i128..4, 0i128..6, -4i128..4, 0i128..6),
        terms in proptest::collection::vec((0u32..3, 0u32..3, -5i128..=5), 1..5),
    ) {
        let u = encode_integer("u", "p", a1, a1 + w1).unwrap();
        let v = encode_integer("v", "q", a2, a2 + w2).unwrap();
        let mut ip = IntegerPolynomial::new();
        for (eu, ev, c) in terms {
            let mut factors = Vec::new();
            if eu > 0 { factors.push(("u", eu)); }
            if ev > 0 { factors.push(("v", ev)); }
            ip.add_term(factors, c);
        }
        let f = ip.binarize(|n| Some(if n == "u" { u.decode_polynomial() } else { v.decode_polynomial() })).unwrap();
        let mut bits_vars = u.bits.clone();
        bits_vars.extend(v.bits.clone());
        for bits in patterns(bits_vars.len()) {
            let x = Assignment::from_bits(&bits_vars, &bits);
            let values = BTreeMap::from([("u".to_string(), u.decode(&x).unwrap()), ("v".to_string(), v.decode(&x).unwrap())]);
            prop_assert_eq!(f.evaluate(&x).unwrap(), r(ip.evaluate(&values).unwrap(), 1));
        }
    }

    #[test]
    fn maxsat_counts_unsatisfied_clauses(
        n in 3usize..=10,
        raw in proptest::collection::vec(proptest::collection::vec((0usize..10, any::<bool>()), 3), 1..=20),
        w in any::<u32>(),
    ) {
        let clauses: Vec<Vec<Literal>> = raw
            .iter()
            .map(|c| {
                let mut seen = BTreeSet::new();
                c.iter()
                    .filter(|(j, _)| seen.insert(j % n))
                    .map(|(j, pos)| Literal { var: Var::new(format!("x{}", j % n + 1)), positive: *pos })
                    .collect()
            })
            .collect();
        let f = maxsat_objective(&clauses).unwrap();
        let vars = xs(n);
        let bits: Vec<bool> = (0..n).map(|j| w >> j & 1 == 1).collect();
        let x = Assignment::from_bits(&vars, &bits);
        let unsat = clauses.iter().filter(|c| !c.iter().any(|l| l.is_satisfied(&x).unwrap())).count();
        prop_assert_eq!(f.evaluate(&x).unwrap(), r(unsat as i128, 1));
    }

    #[test]
    fn iverson_expansion_matches_truth(seed in any::<u64>()) {
        let levels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let names = ["u", "v", "w"];
        let mut reg = VariableRegistry::new();
        for n in names {
            reg.declare_categorical(n, &levels).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let expr = random_predicate(&mut rng, &names, &levels, 3);
        let p = expand_iverson(&expr, &reg).unwrap();
        for choice in 0..27usize {
            let chosen: BTreeMap<&str, &str> = names
                .iter()
                .enumerate()
                .map(|(i, n)| (*n, levels[choice / 3usize.pow(i as u32) % 3].as_str()))
                .collect();
            let mut x = Assignment::new();
            for n in names {
                for l in &levels {
                    x.set(Var::new(format!("{n}={l}")), chosen[n] == l);
                }
            }
            let truth = holds(&expr, &chosen);
            prop_assert_eq!(p.evaluate(&x).unwrap(), r(truth as i128, 1), "{:?} at {:?}", expr, chosen);
        }
    }

    #[test]
    fn penalty_constant_exceeds_range(f in arb_rational_poly(6, 3, 8)) {
        prop_assert!(penalty_constant(&f) > f.upper_bound() - f.lower_bound());
    }

    #[test]
    fn penalties_separate_feasible_from_infeasible(
        f in arb_poly(4, 3, 6, 6),
        h in arb_poly(4, 2, 2, 4),
        leq in any::<bool>(),
    ) {
        let vars = xs(4);
        let c = if leq { Constraint::leq("h", h.clone()) } else { Constraint::eq("h", h.clone()) };
        let mut reg = VariableRegistry::for_polynomial(&f);
        reg.reserve(vars.clone());
        let pen = assemble(&f, &[c.clone()], &mut reg, None);
        prop_assume!(pen.is_ok());
        let pen = pen.unwrap();
        let mut all = vars.clone();
        all.extend(pen.slacks().flat_map(|s| s.bits.clone()));
        prop_assume!(all.len() <= 10);
        let mut max_feasible: Option<Coeff> = None;
        let mut min_infeasible: Option<Coeff> = None;
        let mut best_completion: BTreeMap<Vec<bool>, Coeff> = BTreeMap::new();
        for bits in patterns(all.len()) {
            let x = Assignment::from_bits(&all, &bits);
            let value = pen.assembled.evaluate(&x).unwrap();
            if c.is_satisfied(&x).unwrap() {
                let fx = f.evaluate(&x).unwrap();
                max_feasible = Some(max_feasible.map_or(fx, |m| m.max(fx)));
                let e = best_completion.entry(bits[..4].to_vec()).or_insert(value);
                *e = (*e).min(value);
            } else {
                min_infeasible = Some(min_infeasible.map_or(value, |m| m.min(value)));
            }
        }
        if let (Some(fe), Some(inf)) = (max_feasible, min_infeasible) {
            prop_assert!(inf > fe);
        }
        for (xbits, best) in best_completion {
            prop_assert_eq!(best, eval(&f, &vars, &xbits));
        }
    }

    #[test]
    fn rosenberg_preserves_minimizers(f in arb_poly(5, 4, 9, 8)) {
        let vars = xs(5);
        let mut reg = VariableRegistry::for_polynomial(&f);
        reg.reserve(vars.clone());
        let report = rosenberg_quadratize(&f, None, &mut reg).unwrap();
        prop_assert!(report.output.degree() <= 2);
        let aux = report.auxiliaries();
        prop_assert_eq!(aux.iter().collect::<BTreeSet<_>>().len(), aux.len());
        prop_assert_eq!(aux.len(), report.substitutions.len());
        let mut all = vars.clone();
        all.extend(aux);
        prop_assert_eq!(projected_argmin(&report.output, &all, 5), argmin(&f, &vars));
    }

    #[test]
    fn hybrid_preserves_minimizers(f in arb_poly(5, 4, 9, 8)) {
        let vars = xs(5);
        let mut reg = VariableRegistry::for_polynomial(&f);
        reg.reserve(vars.clone());
        let report = quadratize(&f, Strategy::Hybrid, None, &mut reg).unwrap();
        prop_assert!(report.output.degree() <= 2);
        let aux = report.auxiliaries();
        prop_assert_eq!(aux.iter().collect::<BTreeSet<_>>().len(), aux.len());
        let mut all = vars.clone();
        all.extend(aux);
        prop_assume!(all.len() <= 14);
        prop_assert_eq!(projected_argmin(&report.output, &all, 5), argmin(&f, &vars));
    }

    #[test]
    fn local_transform_is_exact_after_minimizing_aux(f in arb_poly(6, 4, 9, 6)) {
        let negated: Polynomial = Polynomial::from_terms(f.terms().map(|(m, c)| {
            let c = if m.degree() >= 3 && *c > r(0, 1) { -*c } else { *c };
            (m.clone(), c)
        }));
        let vars = xs(6);
        let mut reg = VariableRegistry::for_polynomial(&negated);
        reg.reserve(vars.clone());
        let report = negative_monomial_quadratize(&negated, &mut reg).unwrap();
        prop_assert!(report.output.degree() <= 2);
        let aux = report.auxiliaries();
        for xbits in patterns(6) {
            let best = patterns(aux.len())
                .map(|t| {
                    let mut x = Assignment::from_bits(&vars, &xbits);
                    for (v, b) in aux.iter().zip(&t) {
                        x.set(v.clone(), *b);
                    }
                    report.output.evaluate(&x).unwrap()
                })
                .min()
                .unwrap();
            prop_assert_eq!(best, eval(&negated, &vars, &xbits));
        }
    }

    #[test]
    fn spin_form_matches_values(f in arb_rational_poly(8, 4, 10)) {
        let vars = xs(8);
        let hp = ising_polynomial_from_pb(&f);
        prop_assert!(hp.degree() <= f.degree());
        prop_assert_eq!(hp.to_pb(), f.clone());
        for bits in patterns(8).step_by(7) {
            let x = Assignment::from_bits(&vars, &bits);
            // direct spin evaluation with s = 1 - 2x
            let direct: Coeff = hp
                .terms()
                .map(|(m, c)| {
                    let negatives = m.vars().iter().filter(|v| x.get(v).unwrap_or(false)).count();
                    if negatives % 2 == 1 { -*c } else { *c }
                })
                .sum();
            prop_assert_eq!(direct, f.evaluate(&x).unwrap());
            prop_assert_eq!(hp.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn qubo_ising_roundtrip(f in arb_rational_poly(7, 2, 12)) {
        let vars = xs(7);
        let q = QuboModel::from_polynomial_with_order(&f, &vars).unwrap();
        prop_assert_eq!(q.to_polynomial(), f.clone());
        let m = qubo_to_ising(&q).unwrap();
        prop_assert!((0..7).all(|j| m.j[j][j] == r(0, 1)));
        prop_assert_eq!(ising_to_qubo(&m), q.clone());
        let spin = m.to_spin_polynomial();
        prop_assert_eq!(spin.to_pb(), f.clone());
        for bits in patterns(7) {
            prop_assert_eq!(m.evaluate_bits(&bits), q.evaluate(&bits));
            prop_assert_eq!(q.evaluate(&bits), eval(&f, &vars, &bits));
        }
        let folded = m.folded_coupling_matrix();
        prop_assert_eq!(folded[0][0], m.offset);
    }

    #[test]
    fn annealing_is_deterministic_and_audited(f in arb_poly(6, 2, 5, 10), seed in any::<u64>(), reads in 1usize..60) {
        let vars = xs(6);
        let q = QuboModel::from_polynomial_with_order(&f, &vars).unwrap();
        let m = qubo_to_ising(&q).unwrap();
        let schedule = AnnealSchedule::new(0.1, 5.0, 20).unwrap();
        let a = sample(&m, reads, seed, &schedule).unwrap();
        prop_assert_eq!(&a, &sample(&m, reads, seed, &schedule).unwrap());
        prop_assert_eq!(a.num_reads(), reads);
        for rec in &a.records {
            prop_assert_eq!(rec.energy, eval(&f, &vars, &rec.bits));
        }
    }
}

fn random_predicate(rng: &mut ChaCha8Rng, names: &[&str], levels: &[String], depth: u32) -> IversonExpr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let u = names[rng.gen_range(0..names.len())];
        if rng.gen_bool(0.5) {
            IversonExpr::eq_level(u, &levels[rng.gen_range(0..levels.len())])
        } else {
            IversonExpr::eq_vars(u, names[rng.gen_range(0..names.len())])
        }
    } else {
        match rng.gen_range(0..3) {
            0 => IversonExpr::not(random_predicate(rng, names, levels, depth - 1)),
            1 => IversonExpr::and(random_predicate(rng, names, levels, depth - 1), random_predicate(rng, names, levels, depth - 1)),
            _ => IversonExpr::or(random_predicate(rng, names, levels, depth - 1), random_predicate(rng, names, levels, depth - 1)),
        }
    }
}

fn holds(e: &IversonExpr, chosen: &BTreeMap<&str, &str>) -> bool {
    match e {
        IversonExpr::Or(p, q) => holds(p, chosen) || holds(q, chosen),
        IversonExpr::And(p, q) => holds(p, chosen) && holds(q, chosen),
        IversonExpr::Not(p) => !holds(p, chosen),
        IversonExpr::EqLevel { var, level } => chosen[var.as_str()] == level,
        IversonExpr::EqVars(u, v) => chosen[u.as_str()] == chosen[v.as_str()],
        IversonExpr::EqPosition { .. } => unreachable!(),
    }
}

#[test]
fn rosenberg_gadget_table() {
    let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
    let g = rosenberg_gadget(&x, &y, &z, r(5, 1));
    for w in 0..8 {
        let (a, b, c) = (w & 1 == 1, w & 2 == 2, w & 4 == 4);
        let value = g.evaluate(&Assignment::from_bits(&[x.clone(), y.clone(), z.clone()], &[a, b, c])).unwrap();
        let expected = match (a as i128 + b as i128, c) {
            (2, true) | (0 | 1, false) => 0,
            (2, false) | (1, true) => 5,
            _ => 15,
        };
        assert_eq!(value, r(expected, 1), "{a} {b} {c}");
    }
}

fn random_ising(rng: &mut ChaCha8Rng, n: usize) -> IsingModel {
    let vars = xs(n);
    let mut q = vec![vec![r(0, 1); n]; n];
    for j in 0..n {
        for k in j..n {
            if rng.gen_bool(0.5) {
                let c = r(rng.gen_range(-6..=6), 1);
                q[j][k] = c;
                q[k][j] = c;
            }
        }
    }
    qubo_to_ising(&QuboModel::new(vars, q, r(0, 1)).unwrap()).unwrap()
}

#[test]
fn annealing_agrees_with_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let schedule = AnnealSchedule::new(0.1, 10.0, 400).unwrap();
    let mut hits = 0;
    for trial in 0..100u64 {
        let n = rng.gen_range(4..=16);
        let m = random_ising(&mut rng, n);
        let f = m.to_spin_polynomial().to_pb();
        let exact = brute_force(&f, &m.variables).unwrap().lowest_energy().unwrap();
        let found = sample(&m, 20, trial, &schedule).unwrap().lowest_energy().unwrap();
        assert!(found >= exact, "trial {trial}: sampled below the exact minimum");
        if found == exact {
            hits += 1;
        }
    }
    assert!(hits >= 95, "only {hits}/100 trials reached the exact minimum");
}

fn random_spin_poly(rng: &mut ChaCha8Rng, n: usize) -> IsingPolynomial {
    let mut hp = IsingPolynomial::default();
    for _ in 0..rng.gen_range(1..=8) {
        let vars: BTreeSet<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(1..=n)).collect();
        hp.add_term(Monomial::new(vars.into_iter().map(|j| Var::new(format!("x{j}")))), r(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
    }
    hp
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let mut a: Vec<Complex64> = (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().for_each(|c| *c /= norm);
    StateVector::from_amplitudes(a).unwrap()
}

#[test]
fn phase_circuit_is_the_diagonal_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let order = xs(n);
        let hp = random_spin_poly(&mut rng, n);
        let gamma = rng.gen_range(-3.2..3.2);
        let input = random_state(&mut rng, n);
        let mut out = input.clone();
        for g in synthesize_phase_circuit(&hp, &order, gamma).unwrap().gates() {
            out.apply(g);
        }
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        let a0 = to_f64(&hp.constant_term());
        for (w, (o, i)) in out.amplitudes().iter().zip(input.amplitudes()).enumerate() {
            let bits = input.index_bits(w);
            let x = Assignment::from_bits(&order, &bits);
            let fw = to_f64(&hp.evaluate(&x).unwrap());
            let expected = i * Complex64::from_polar(1.0, -gamma * (fw - a0));
            assert!((o - expected).norm() < 1e-9);
        }
        let mut terms: Vec<(Monomial, Coeff)> = hp.terms().map(|(m, c)| (m.clone(), *c)).collect();
        for i in (1..terms.len()).rev() {
            terms.swap(i, rng.gen_range(0..=i));
        }
        let mut shuffled = input.clone();
        for g in synthesize_phase_terms(terms.iter().map(|(m, c)| (m, c)), &order, gamma).unwrap().gates() {
            shuffled.apply(g);
        }
        for (a, b) in out.amplitudes().iter().zip(shuffled.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }
}

#[test]
fn ansatz_is_unitary_and_trivial_at_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let order = xs(n);
        let hp = random_spin_poly(&mut rng, n);
        let f = hp.to_pb();
        let layers = rng.gen_range(1..=3);
        let params = QaoaParams::new(
            (0..layers).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            (0..layers).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let sv = simulate(&build_ansatz(&hp, &order, &params).unwrap()).unwrap();
        assert!((sv.norm_sqr() - 1.0).abs() < 1e-9);
        let q = Qaoa::new(&f, &order).unwrap();
        let e0 = q.energy(&QaoaParams::constant(layers, 0.0).unwrap()).unwrap();
        let mean = (0..1usize << n).map(|w| to_f64(&eval(&f, &order, &sv.index_bits(w)))).sum::<f64>() / (1 << n) as f64;
        assert!((e0 - to_f64(&hp.constant_term())).abs() < 1e-9);
        assert!((e0 - mean).abs() < 1e-9);
    }
}

#[test]
fn shot_frequencies_follow_born_rule() {
    // 0.999 quantile of chi-square with 7 degrees of freedom
    let critical = 24.322;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let f = Polynomial::zero();
    let order = xs(3);
    for seed in 0..10u64 {
        let sv = random_state(&mut rng, 3);
        let probs = sv.probabilities();
        prop_assume_nonzero(&probs);
        let shots = 8000;
        let set = sample_counts(&sv, shots, seed, &f, &order).unwrap();
        let mut counts = vec![0usize; 8];
        for rec in &set.records {
            let w = rec.bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
            counts[w] += rec.occurrences;
        }
        let chi2: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&c, &p)| {
                let e = p * shots as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        assert!(chi2 < critical, "seed {seed}: chi-square {chi2}");
    }
}

fn prop_assume_nonzero(probs: &[f64]) {
    assert!(probs.iter().all(|&p| p > 1e-6), "degenerate random state");
}

fn random_spec(rng: &mut ChaCha8Rng) -> ProblemSpec {
    let mut variables = vec![
        VariableDecl::Bool { name: "b".into() },
        VariableDecl::Bool { name: "c".into() },
        VariableDecl::Int {
            name: "z".into(),
            lower: rng.gen_range(-5..0),
            upper: rng.gen_range(0..6),
            bit_prefix: if rng.gen_bool(0.5) { Some("x".into()) } else { None },
        },
    ];
    let levels: Vec<String> = ["red", "green"].map(String::from).to_vec();
    if rng.gen_bool(0.5) {
        variables.push(VariableDecl::Categorical { name: "u".into(), levels: levels.clone() });
        variables.push(VariableDecl::Categorical { name: "v".into(), levels });
    }
    let has_perm = rng.gen_bool(0.5);
    if has_perm {
        variables.push(VariableDecl::Permutation { name: "p".into(), size: 2 });
    }
    let mut polynomial = IntegerPolynomial::new();
    for _ in 0..rng.gen_range(1..4) {
        let factors = [("z", rng.gen_range(1..3)), ("b", 1)];
        let k = rng.gen_range(1..=2);
        polynomial.add_term(factors[..k].to_vec(), rng.gen_range(-9..=9));
    }
    let iverson = if variables.iter().any(|v| v.name() == "u") {
        vec![WeightedPredicate { weight: rng.gen_range(1..4), expr: IversonExpr::eq_vars("u", "v") }]
    } else {
        Vec::new()
    };
    let permutation_costs = if has_perm {
        vec![PermutationCost { perm: "p".into(), costs: vec![vec![1, 2], vec![3, rng.gen_range(0..5)]] }]
    } else {
        Vec::new()
    };
    let constraints = (0..rng.gen_range(0..3))
        .map(|i| ConstraintSpec {
            id: if rng.gen_bool(0.5) { Some(format!("k{i}")) } else { None },
            polynomial: IntegerPolynomial::new().with_term([("z", 1)], 1).with_term::<[(&str, u32); 0], &str>([], -rng.gen_range(0..3)),
            relation: if rng.gen_bool(0.5) { qubokit::penalty::Relation::Eq } else { qubokit::penalty::Relation::Leq },
        })
        .collect();
    ProblemSpec {
        format_version: 1,
        sense: if rng.gen_bool(0.5) { Sense::Min } else { Sense::Max },
        variables,
        objective: Objective {
            polynomial,
            clauses: vec![vec!["b".into(), "-c".into()]],
            iverson,
            permutation_costs,
        },
        constraints,
    }
}

#[test]
fn problem_print_parse_roundtrip_and_deterministic_compile() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let text = print_problem(&spec);
        let back = parse_problem(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(back, spec);
        let flags = CompileFlags::default();
        let a = serde_json::to_string(&compile(&spec, &flags).unwrap()).unwrap();
        let b = serde_json::to_string(&compile(&back, &flags).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
