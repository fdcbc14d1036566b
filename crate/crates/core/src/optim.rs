//! Derivative-free minimization with a hard evaluation budget.

use serde::{Deserialize, Serialize};

/// Nelder–Mead coefficients and the initial simplex size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Offset added to one coordinate at a time to build the start simplex.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluation: usize,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Every evaluation in order.
    pub trace: Vec<TracePoint>,
}

struct Budgeted<F> {
    f: F,
    budget: usize,
    trace: Vec<TracePoint>,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.trace.len() >= self.budget {
            return None;
        }
        let v = (self.f)(x);
        self.trace.push(TracePoint {
            evaluation: self.trace.len() + 1,
            point: x.to_vec(),
            value: v,
        });
        Some(v)
    }

    fn best(self) -> Minimum {
        let evaluations = self.trace.len();
        let best = self
            .trace
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("at least one evaluation");
        Minimum {
            point: best.point.clone(),
            value: best.value,
            evaluations,
            trace: self.trace,
        }
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl NelderMead {
    /// Minimizes `f` from `x0` using at most `budget` evaluations (at least
    /// one is always spent on `x0`). The returned point is the best one
    /// evaluated, so its value never exceeds `f(x0)`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, x0: &[f64], budget: usize) -> Minimum {
        let mut bf = Budgeted {
            f,
            budget: budget.max(1),
            trace: Vec::new(),
        };
        self.run(&mut bf, x0);
        bf.best()
    }

    fn run<F: FnMut(&[f64]) -> f64>(&self, bf: &mut Budgeted<F>, x0: &[f64]) -> Option<()> {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), bf.eval(x0)?));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = bf.eval(&x)?;
            simplex.push((x, v));
        }
        if n == 0 {
            return Some(());
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let worst = simplex[n].clone();
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let reflected = lerp(&centroid, &worst.0, -self.reflection);
            let fr = bf.eval(&reflected)?;
            if fr < simplex[0].1 {
                let expanded = lerp(&centroid, &worst.0, -self.reflection * self.expansion);
                let fe = bf.eval(&expanded)?;
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            // contraction, outside when the reflection improved on the worst
            let (target, ft) = if fr < worst.1 { (reflected.clone(), fr) } else { (worst.0.clone(), worst.1) };
            let contracted = lerp(&centroid, &target, self.contraction);
            let fc = bf.eval(&contracted)?;
            if fc < ft {
                simplex[n] = (contracted, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&best, &vertex.0, self.shrink);
                let v = bf.eval(&x)?;
                *vertex = (x, v);
            }
        }
    }
}
