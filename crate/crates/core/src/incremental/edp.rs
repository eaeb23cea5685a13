use serde::Serialize;

use crate::error::{Error, Result};
use crate::incremental::trajectory::DiscreteTrajectory;
use crate::ledger::LedgerEntry;
use crate::linalg::{dot, sub};
use crate::model::System;

/// Discrete energy-dissipation balance along the affine interpolant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdpCheck {
    /// Signed residual at every partition node (`residuals[0] = 0`).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `λ Δ_N |z̃|^2_{H^1(0,T;V)}`
    pub bound: f64,
    /// Accumulated Fenchel gaps `Σ τ_s g_s >= 0` left by the inner solver.
    pub solver_gap: f64,
    pub rounding: f64,
}

impl EdpCheck {
    pub fn entry(&self) -> LedgerEntry {
        LedgerEntry::le(
            "discrete_edp",
            self.max_residual,
            self.bound + self.solver_gap + self.rounding,
        )
    }
}

/// `I(z̃(t)) + ∫ R_ε(ż̃) + R*_ε(-DE(t̄, z̄)) - I(z_0) - ∫ <l(t̄), ż̃>` at the nodes.
/// `lambda` is the semiconvexity defect of `I` on a ball containing the states.
pub fn check_discrete_edp(
    system: &System,
    traj: &DiscreteTrajectory,
    lambda: f64,
) -> Result<EdpCheck> {
    let eps = traj.eps();
    if !(eps > 0.0) {
        return Err(Error::NonPositiveViscosity(eps));
    }
    let metric = &system.metric;
    let p = traj.partition();
    let i0 = system.energy.internal(traj.state(0));
    let mut residuals = vec![0.0];
    let mut acc = 0.0;
    let mut magnitude = i0.abs();
    let mut gap = 0.0;
    let mut h1 = 0.0;
    for k in 1..=p.steps() {
        let tau = p.tau(k);
        let dz = traj.increment(k);
        let lk = traj.load_value(k);
        let w = sub(lk, &system.energy.grad_internal(traj.state(k)));
        let diss = system.step_dissipation(eps, tau, &dz);
        let conj = tau * system.dissipation.conjugate_viscous(metric, eps, &w)?;
        let power = dot(lk, &dz);
        acc += diss + conj - power;
        magnitude += diss.abs() + conj.abs() + power.abs();
        gap += (diss + conj - dot(&w, &dz)).max(0.0);
        let ik = system.energy.internal(traj.state(k));
        residuals.push(ik + acc - i0);
        let (a, b) = (traj.state(k - 1), traj.state(k));
        h1 += tau / 3.0 * (metric.quad(a) + metric.inner(a, b) + metric.quad(b))
            + metric.quad(&dz) / tau;
    }
    let max_residual = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(EdpCheck {
        max_residual,
        residuals,
        bound: lambda * p.fineness() * h1,
        solver_gap: gap,
        rounding: 1e-12 * (1.0 + magnitude),
    })
}
