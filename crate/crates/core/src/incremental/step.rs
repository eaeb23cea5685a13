use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, lex_cmp, sub};
use crate::model::System;

pub const DEFAULT_TOL_INNER: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 50_000;

const MAX_BACKTRACKS: usize = 60;
const NEWTON_ITERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiStart {
    /// Only when the step may be nonconvex, i.e. `ε/τ <= λ`.
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepOptions {
    pub tol_inner: f64,
    pub max_iter: usize,
    pub multistart: MultiStart,
    /// Shuffles the order in which multi-start candidates are tried.
    pub seed: u64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            tol_inner: DEFAULT_TOL_INNER,
            max_iter: DEFAULT_MAX_ITER,
            multistart: MultiStart::Auto,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub z: Vec<f64>,
    /// First-order residual of the discrete inclusion (max norm).
    pub residual: f64,
    pub iterations: usize,
    pub objective: f64,
    pub starts: usize,
}

/// `min_v E(t_k, v) + R(v - z_prev) + ε/(2τ) |v - z_prev|_V^2` for one step.
pub struct StepProblem<'a> {
    system: &'a System,
    load: Vec<f64>,
    tau: f64,
    eps: f64,
    z_prev: &'a [f64],
}

impl<'a> StepProblem<'a> {
    pub fn new(system: &'a System, load: Vec<f64>, tau: f64, eps: f64, z_prev: &'a [f64]) -> Self {
        Self {
            system,
            load,
            tau,
            eps,
            z_prev,
        }
    }

    fn viscous_weight(&self) -> f64 {
        self.eps / self.tau
    }

    fn smooth_value(&self, v: &[f64]) -> f64 {
        let d = sub(v, self.z_prev);
        self.system.energy.energy_with(&self.load, v)
            + 0.5 * self.viscous_weight() * self.system.metric.quad(&d)
    }

    fn smooth_grad(&self, v: &[f64]) -> Vec<f64> {
        let mut g = self.system.energy.grad_with(&self.load, v);
        if self.eps > 0.0 {
            let vd = self.system.metric.apply(&sub(v, self.z_prev));
            for (gi, x) in g.iter_mut().zip(vd) {
                *gi += self.viscous_weight() * x;
            }
        }
        g
    }

    pub fn objective(&self, v: &[f64]) -> f64 {
        self.smooth_value(v) + self.system.dissipation.value(&sub(v, self.z_prev))
    }

    /// `z_prev + soft(y - z_prev, γ r)`, the prox of `γ R(· - z_prev)`.
    fn prox(&self, y: &[f64], gamma: f64) -> Vec<f64> {
        let w = self.system.dissipation.weights();
        y.iter()
            .zip(self.z_prev)
            .zip(w)
            .map(|((yi, pi), ri)| {
                let d = yi - pi;
                let k = gamma * ri;
                if d > k {
                    pi + (d - k)
                } else if d < -k {
                    pi + (d + k)
                } else {
                    *pi
                }
            })
            .collect()
    }

    /// Violation of `σ := -DE(t_k, v) - (ε/τ) V Δ ∈ ∂R(Δ)`, coordinate-wise.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let sigma = self.smooth_grad(v);
        let w = self.system.dissipation.weights();
        let mut worst = 0.0_f64;
        for i in 0..v.len() {
            let s = -sigma[i];
            let d = v[i] - self.z_prev[i];
            let viol = if d > 0.0 {
                (s - w[i]).abs()
            } else if d < 0.0 {
                (s + w[i]).abs()
            } else {
                (s.abs() - w[i]).max(0.0)
            };
            worst = worst.max(viol);
        }
        worst
    }

    fn hessian(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut h = self.system.energy.nonlinearity().hessian(v);
        let a = self.system.energy.operator();
        let m = &self.system.metric;
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] += a.entry(i, j) + self.viscous_weight() * m.entry(i, j);
            }
        }
        h
    }

    /// Gershgorin bound on the smooth part's Hessian at `v`.
    fn curvature_bound(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let h = self.hessian(v);
        (0..n)
            .map(|i| (0..n).map(|j| h[i * n + j].abs()).sum::<f64>())
            .fold(f64::MIN_POSITIVE, f64::max)
    }

    /// Newton iteration for the smooth equations on the support of `p`
    /// with its signs frozen. `None` if the pattern is empty, the reduced
    /// Hessian is indefinite or a sign flips.
    fn newton_polish(&self, p: &[f64], tol: f64) -> Option<Vec<f64>> {
        let w = self.system.dissipation.weights();
        let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] != self.z_prev[i]).collect();
        if support.is_empty() {
            return None;
        }
        let signs: Vec<f64> = support
            .iter()
            .map(|&i| (p[i] - self.z_prev[i]).signum())
            .collect();
        let reduced = |x: &[f64]| {
            self.smooth_value(x)
                + support
                    .iter()
                    .zip(&signs)
                    .map(|(&i, s)| w[i] * s * (x[i] - self.z_prev[i]))
                    .sum::<f64>()
        };
        let n = p.len();
        let k = support.len();
        let mut x = p.to_vec();
        for _ in 0..NEWTON_ITERS {
            let g = self.smooth_grad(&x);
            let rhs = DVector::from_iterator(
                k,
                support.iter().zip(&signs).map(|(&i, s)| -(g[i] + w[i] * s)),
            );
            if rhs.amax() <= 0.01 * tol {
                break;
            }
            let h = self.hessian(&x);
            let hpp = DMatrix::from_fn(k, k, |a, b| h[support[a] * n + support[b]]);
            let step = hpp.cholesky()?.solve(&rhs);
            let f0 = reduced(&x);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let mut y = x.clone();
                for (a, &i) in support.iter().enumerate() {
                    y[i] += alpha * step[a];
                }
                if reduced(&y) <= f0 + 1e-14 * (1.0 + f0.abs()) {
                    x = y;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let consistent = support
            .iter()
            .zip(&signs)
            .all(|(&i, s)| (x[i] - self.z_prev[i]) * s > 0.0);
        consistent.then_some(x)
    }

    /// Proximal gradient with backtracking plus active-set Newton, from `start`.
    pub fn local_solve(
        &self,
        start: &[f64],
        options: &StepOptions,
        step: usize,
    ) -> Result<StepOutcome> {
        let tol = options.tol_inner;
        let mut v = start.to_vec();
        let mut lip = self.curvature_bound(&v);
        let mut residual = self.residual(&v);
        let mut obj = self.objective(&v);
        for it in 0..options.max_iter {
            if residual <= tol {
                return Ok(StepOutcome {
                    z: v,
                    residual,
                    iterations: it,
                    objective: obj,
                    starts: 1,
                });
            }
            let g = self.smooth_grad(&v);
            let sv = self.smooth_value(&v);
            let mut backtracks = 0;
            let p = loop {
                let y: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - b / lip).collect();
                let p = self.prox(&y, 1.0 / lip);
                let d = sub(&p, &v);
                let model = sv + dot(&g, &d) + 0.5 * lip * dot(&d, &d);
                if self.smooth_value(&p) <= model + 1e-15 * (1.0 + sv.abs()) {
                    break p;
                }
                lip *= 2.0;
                backtracks += 1;
                if backtracks > MAX_BACKTRACKS {
                    return Err(Error::LineSearchFailure { step });
                }
            };
            let p_obj = self.objective(&p);
            if p_obj > obj + 1e-12 * (1.0 + obj.abs()) {
                return Err(Error::LineSearchFailure { step });
            }
            let (next, next_obj) = match self.newton_polish(&p, tol) {
                Some(q) => {
                    let q_obj = self.objective(&q);
                    if q_obj <= p_obj + 1e-13 * (1.0 + p_obj.abs()) {
                        (q, q_obj)
                    } else {
                        (p, p_obj)
                    }
                }
                None => (p, p_obj),
            };
            v = next;
            obj = next_obj;
            residual = self.residual(&v);
            lip *= 0.8;
        }
        Err(Error::InnerSolverStalled {
            step,
            residual,
            best: v,
        })
    }

    fn candidates(&self, warm: &[f64]) -> Vec<Vec<f64>> {
        let n = warm.len();
        let mut out = vec![warm.to_vec(), self.z_prev.to_vec()];
        for i in 0..n {
            let kick = 1.0_f64.max(self.z_prev[i].abs());
            for sgn in [1.0, -1.0] {
                let mut c = self.z_prev.to_vec();
                c[i] += sgn * kick;
                out.push(c);
            }
        }
        let g = self.smooth_grad(self.z_prev);
        let lip = self.curvature_bound(self.z_prev);
        let y: Vec<f64> = self
            .z_prev
            .iter()
            .zip(&g)
            .map(|(a, b)| a - b / lip)
            .collect();
        out.push(self.prox(&y, 1.0 / lip));
        out
    }
}

/// Deterministic preference between two local minimizers: lower objective,
/// then closer to `z_prev` in the metric, then lexicographic.
fn prefer(problem: &StepProblem<'_>, a: &StepOutcome, b: &StepOutcome) -> Ordering {
    let scale = 1.0 + a.objective.abs().max(b.objective.abs());
    if (a.objective - b.objective).abs() > 1e-10 * scale {
        return a.objective.total_cmp(&b.objective);
    }
    let m = &problem.system.metric;
    let da = m.norm(&sub(&a.z, problem.z_prev));
    let db = m.norm(&sub(&b.z, problem.z_prev));
    if (da - db).abs() > 1e-10 * (1.0 + da.max(db)) {
        return da.total_cmp(&db);
    }
    lex_cmp(&a.z, &b.z)
}

/// One step of the incremental scheme; `lambda` is the calibrated
/// semiconvexity defect that decides whether multi-start is engaged.
#[allow(clippy::too_many_arguments)]
pub fn incremental_step(
    system: &System,
    load: Vec<f64>,
    tau: f64,
    eps: f64,
    z_prev: &[f64],
    warm_start: &[f64],
    lambda: f64,
    options: &StepOptions,
    step: usize,
) -> Result<StepOutcome> {
    if !(tau > 0.0) {
        return Err(Error::InvalidPartition(format!("non-positive step {tau}")));
    }
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::NonPositiveViscosity(eps));
    }
    let problem = StepProblem::new(system, load, tau, eps, z_prev);
    let multistart = match options.multistart {
        MultiStart::Always => true,
        MultiStart::Never => false,
        MultiStart::Auto => eps / tau <= lambda,
    };
    if !multistart {
        return problem.local_solve(warm_start, options, step);
    }
    let mut starts = problem.candidates(warm_start);
    starts.shuffle(&mut ChaCha8Rng::seed_from_u64(options.seed ^ step as u64));
    let mut best: Option<StepOutcome> = None;
    let mut first_err = None;
    let count = starts.len();
    for s in starts {
        match problem.local_solve(&s, options, step) {
            Ok(out) => {
                best = Some(match best {
                    Some(b) if prefer(&problem, &b, &out) != Ordering::Greater => b,
                    _ => out,
                });
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.starts = count;
            Ok(b)
        }
        None => Err(first_err.expect("at least one start")),
    }
}

/// `ε/τ > 1.1 λ`: the step objective is strictly convex and the minimizer unique.
pub fn in_uniqueness_regime(eps: f64, fineness: f64, lambda: f64) -> bool {
    eps / fineness > 1.1 * lambda || (lambda == 0.0 && eps >= 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::load::BvLoad;
    use crate::model::{Dissipation, Nonlinearity, SemilinearEnergy, SpdOperator};

    fn play(load: f64) -> System {
        let e = SemilinearEnergy::new(
            SpdOperator::identity(1),
            Nonlinearity::None,
            BvLoad::constant(1.0, vec![load]).unwrap(),
        )
        .unwrap();
        System::new(
            e,
            Dissipation::uniform(1, 1.0).unwrap(),
            SpdOperator::identity(1),
        )
        .unwrap()
    }

    fn solve(load: f64, eps: f64) -> StepOutcome {
        let s = play(load);
        incremental_step(
            &s,
            vec![load],
            1.0,
            eps,
            &[0.0],
            &[0.0],
            0.0,
            &StepOptions::default(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn elastic_load_does_not_move() {
        let out = solve(0.5, 0.0);
        assert_eq!(out.z, vec![0.0]);
        assert!(out.residual <= 1e-9);
    }

    #[test]
    fn soft_threshold_example() {
        // argmin v^2/2 - 3v + |v| = 2
        assert!((solve(3.0, 0.0).z[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn viscous_example() {
        // argmin v^2/2 - 3v + |v| + v^2/2 = 1
        assert!((solve(3.0, 1.0).z[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn multistart_finds_a_stable_well() {
        // Double well tilted to the right: from z = -1 the global minimizer
        // sits in the right well.
        let e = SemilinearEnergy::new(
            SpdOperator::scalar(1, 0.01).unwrap(),
            Nonlinearity::DoubleWell { scale: 1.0 },
            BvLoad::constant(1.0, vec![0.3]).unwrap(),
        )
        .unwrap();
        let s = System::new(
            e,
            Dissipation::uniform(1, 0.05).unwrap(),
            SpdOperator::identity(1),
        )
        .unwrap();
        let opts = StepOptions {
            multistart: MultiStart::Always,
            ..StepOptions::default()
        };
        let out =
            incremental_step(&s, vec![0.3], 1.0, 0.0, &[-1.0], &[-1.0], 1.1, &opts, 1).unwrap();
        assert!(out.z[0] > 0.5);
        assert!(out.starts > 1);
        // Shuffling the starts does not change the selection.
        let other = StepOptions { seed: 99, ..opts };
        let again =
            incremental_step(&s, vec![0.3], 1.0, 0.0, &[-1.0], &[-1.0], 1.1, &other, 1).unwrap();
        assert_eq!(out.z, again.z);
    }
}
