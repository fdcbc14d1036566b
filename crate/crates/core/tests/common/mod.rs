#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;
use qubokit::{Assignment, Coeff, Monomial, Polynomial, Var};

pub fn r(n: i128, d: i128) -> Coeff {
    Ratio::new(n, d)
}

/// Parses sums like `-9 + 13x1 - 18x1x2 + 5/2 x1 z` into a polynomial,
/// independently of the library's own arithmetic. Variable names are a
/// letter followed by digits; juxtaposition or `*` multiplies.
pub fn poly(text: &str) -> Polynomial {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    let mut terms: Vec<(Vec<Var>, Coeff)> = Vec::new();
    while i < chars.len() {
        let mut sign = 1;
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let mut num = String::new();
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
            num.push(chars[i]);
            i += 1;
        }
        let coef = if num.is_empty() {
            r(1, 1)
        } else if let Some((a, b)) = num.split_once('/') {
            r(a.parse().unwrap(), b.parse().unwrap())
        } else {
            r(num.parse().unwrap(), 1)
        };
        let mut vars = Vec::new();
        while i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '*') {
            if chars[i] == '*' {
                i += 1;
                continue;
            }
            let mut name = chars[i].to_string();
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                name.push(chars[i]);
                i += 1;
            }
            vars.push(Var::new(name));
        }
        terms.push((vars, coef * sign));
    }
    let mut f = Polynomial::zero();
    for (vars, c) in terms {
        f.add_term(Monomial::new(vars), c);
    }
    f
}

pub fn xs(n: usize) -> Vec<Var> {
    (1..=n).map(|j| Var::new(format!("x{j}"))).collect()
}

/// Bit patterns in lexicographic order, first variable most significant.
pub fn patterns(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << n).map(move |w| (0..n).map(|j| w >> (n - 1 - j) & 1 == 1).collect())
}

pub fn eval(f: &Polynomial, vars: &[Var], bits: &[bool]) -> Coeff {
    f.evaluate(&Assignment::from_bits(vars, bits)).unwrap()
}

/// Minimum and minimizing patterns by plain enumeration.
pub fn argmin(f: &Polynomial, vars: &[Var]) -> (Coeff, BTreeSet<Vec<bool>>) {
    let mut best: Option<Coeff> = None;
    let mut set = BTreeSet::new();
    for bits in patterns(vars.len()) {
        let v = eval(f, vars, &bits);
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => {
                set.insert(bits);
            }
            _ => {
                best = Some(v);
                set = BTreeSet::from([bits]);
            }
        }
    }
    (best.unwrap(), set)
}

/// Minimizers of `f` over `all`, projected onto the first `keep` variables
/// of `all`.
pub fn projected_argmin(f: &Polynomial, all: &[Var], keep: usize) -> (Coeff, BTreeSet<Vec<bool>>) {
    let (m, set) = argmin(f, all);
    (m, set.into_iter().map(|b| b[..keep].to_vec()).collect())
}

/// Random multilinear polynomial over `x1..x{n}`: up to `max_terms` terms
/// of degree at most `max_degree` with integer coefficients in `[-c, c]`.
pub fn arb_poly(n: usize, max_degree: usize, c: i128, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (proptest::collection::btree_set(1..=n, 0..=max_degree), -c..=c);
    proptest::collection::vec(term, 0..=max_terms).prop_map(|terms| {
        let mut f = Polynomial::zero();
        for (vs, k) in terms {
            f.add_term(Monomial::new(vs.into_iter().map(|j| Var::new(format!("x{j}")))), r(k, 1));
        }
        f
    })
}

/// Like [`arb_poly`] with rational coefficients `k/d`, `d` in `1..=4`.
pub fn arb_rational_poly(n: usize, max_degree: usize, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (proptest::collection::btree_set(1..=n, 0..=max_degree), -9i128..=9, 1i128..=4);
    proptest::collection::vec(term, 0..=max_terms).prop_map(|terms| {
        let mut f = Polynomial::zero();
        for (vs, k, d) in terms {
            f.add_term(Monomial::new(vs.into_iter().map(|j| Var::new(format!("x{j}")))), r(k, d));
        }
        f
    })
}
