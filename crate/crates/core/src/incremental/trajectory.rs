use serde::Serialize;

use crate::error::Result;
use crate::incremental::partition::Partition;
use crate::incremental::step::{incremental_step, StepOptions};
use crate::linalg::{lerp, sub};
use crate::load::PiecewiseLinearCurve;
use crate::model::System;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarmStart {
    /// Start each step from `z_{k-1}`.
    Previous,
    /// Start from the linear extrapolation `2 z_{k-1} - z_{k-2}`.
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub step: StepOptions,
    pub warm_start: WarmStart,
    /// Calibrated semiconvexity defect; steps with `ε/τ <= lambda` use multi-start.
    pub lambda: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            step: StepOptions::default(),
            warm_start: WarmStart::Previous,
            lambda: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub iterations: usize,
    pub residual: f64,
    /// `E(t_k, z_k)`
    pub energy: f64,
    /// `τ_k R_ε(Δz_k / τ_k)`
    pub dissipation: f64,
    pub starts: usize,
}

/// States of the incremental scheme on a partition.
#[derive(Debug, Clone)]
pub struct DiscreteTrajectory {
    partition: Partition,
    states: Vec<Vec<f64>>,
    loads: Vec<Vec<f64>>,
    eps: f64,
    steps: Vec<StepRecord>,
}

impl DiscreteTrajectory {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// `l(t_k)` as used by step `k` (`k = 0` is the initial time).
    pub fn load_value(&self, k: usize) -> &[f64] {
        &self.loads[k]
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Records of steps `1..=N` (index `k - 1`).
    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn increment(&self, k: usize) -> Vec<f64> {
        sub(&self.states[k], &self.states[k - 1])
    }

    pub fn max_residual(&self) -> f64 {
        self.steps.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }

    pub fn interpolants(&self) -> Interpolants<'_> {
        Interpolants { traj: self }
    }

    /// Affine interpolant as a curve over `[0, T]`.
    pub fn affine_curve(&self) -> PiecewiseLinearCurve {
        PiecewiseLinearCurve::new(self.partition.times().to_vec(), self.states.clone())
            .expect("partition nodes are strictly increasing")
    }
}

/// Piecewise affine and piecewise constant interpolants of a trajectory.
pub struct Interpolants<'a> {
    traj: &'a DiscreteTrajectory,
}

impl Interpolants<'_> {
    pub fn affine(&self, t: f64) -> Vec<f64> {
        let p = &self.traj.partition;
        let k = p.step_of(t);
        let theta = ((t - p.times()[k - 1]) / p.tau(k)).clamp(0.0, 1.0);
        lerp(&self.traj.states[k - 1], &self.traj.states[k], theta)
    }

    /// `z̄(t) = z_k` on `(t_{k-1}, t_k]`, `z̄(0) = z_0`.
    pub fn right(&self, t: f64) -> &[f64] {
        if t <= self.traj.partition.start() {
            return &self.traj.states[0];
        }
        &self.traj.states[self.traj.partition.step_of(t)]
    }

    /// `z̲(t) = z_{k-1}` on `[t_{k-1}, t_k)`, `z̲(T) = z_N`.
    pub fn left(&self, t: f64) -> &[f64] {
        let p = &self.traj.partition;
        if t >= p.end() {
            return self.traj.final_state();
        }
        let k = p.times().partition_point(|x| *x <= t);
        &self.traj.states[k - 1]
    }

    /// `t̄(t) = t_k` on `(t_{k-1}, t_k]`.
    pub fn right_time(&self, t: f64) -> f64 {
        let p = &self.traj.partition;
        if t <= p.start() {
            return p.start();
        }
        p.times()[p.step_of(t)]
    }
}

/// Runs the incremental scheme from `z0` on `partition` with viscosity `eps`.
pub fn solve_trajectory(
    system: &System,
    partition: &Partition,
    eps: f64,
    z0: &[f64],
    options: &SolveOptions,
) -> Result<DiscreteTrajectory> {
    let load = system.load();
    let n_steps = partition.steps();
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut loads = Vec::with_capacity(n_steps + 1);
    let mut steps = Vec::with_capacity(n_steps);
    states.push(z0.to_vec());
    loads.push(load.at(partition.start()));
    for k in 1..=n_steps {
        let t = partition.times()[k];
        let tau = partition.tau(k);
        let lk = load.at(t);
        let prev = &states[k - 1];
        let warm = match options.warm_start {
            WarmStart::Previous => prev.clone(),
            WarmStart::Extrapolated if k >= 2 => prev
                .iter()
                .zip(&states[k - 2])
                .map(|(a, b)| 2.0 * a - b)
                .collect(),
            WarmStart::Extrapolated => prev.clone(),
        };
        let out = incremental_step(
            system,
            lk.clone(),
            tau,
            eps,
            prev,
            &warm,
            options.lambda,
            &options.step,
            k,
        )?;
        let delta = sub(&out.z, prev);
        steps.push(StepRecord {
            iterations: out.iterations,
            residual: out.residual,
            energy: system.energy.energy_with(&lk, &out.z),
            dissipation: system.step_dissipation(eps, tau, &delta),
            starts: out.starts,
        });
        states.push(out.z);
        loads.push(lk);
    }
    Ok(DiscreteTrajectory {
        partition: partition.clone(),
        states,
        loads,
        eps,
        steps,
    })
}
