use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::incremental::estimates::check_inclusion;
use crate::incremental::{
    check_basic_estimates, check_bv_estimates, check_discrete_edp, estimate_constants,
    solve_trajectory, DiscreteTrajectory, EdpCheck, EstimateConstants, Partition, SolveOptions,
};
use crate::ledger::Ledger;
use crate::model::System;
use crate::viscosity::certify::{certify, CertifyOptions, CurveCertificates, CurveFields};
use crate::viscosity::curve::{resample, uniform_grid, CurveData};
use crate::viscosity::reparam::{reparameterize, DEFAULT_SUB_NODES};

/// Relative size below which consecutive curves count as identical.
pub const CAUCHY_ROUNDING: f64 = 1e-12;

/// Ties the time step to the viscosity: `Δ_N <= c ε^p` with `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshRule {
    pub c: f64,
    pub power: f64,
}

impl MeshRule {
    pub fn linear(c: f64) -> Self {
        Self { c, power: 1.0 }
    }

    pub fn max_step(&self, eps: f64) -> f64 {
        self.c * eps.powf(self.power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOptions {
    pub eps_ladder: Vec<f64>,
    pub mesh: MeshRule,
    /// Fixed uniform partition with this many steps instead of the mesh rule.
    pub steps: Option<usize>,
    pub sub_nodes: usize,
    pub solve: SolveOptions,
    pub certify: CertifyOptions,
    /// Inner-solver acceptance threshold recorded in the ledgers.
    pub tol_inner: f64,
    /// Upper bound on the number of points of the common arc-length grid.
    pub max_resample_points: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            eps_ladder: vec![0.2, 0.1, 0.05, 0.025],
            mesh: MeshRule::linear(0.5),
            steps: None,
            sub_nodes: DEFAULT_SUB_NODES,
            solve: SolveOptions::default(),
            certify: CertifyOptions::default(),
            tol_inner: 1e-6,
            max_resample_points: 200_000,
        }
    }
}

/// Everything computed at one viscosity.
#[derive(Debug, Clone)]
pub struct Level {
    pub eps: f64,
    pub trajectory: DiscreteTrajectory,
    pub constants: EstimateConstants,
    pub ledger: Ledger,
    pub edp: EdpCheck,
    pub curve: CurveData,
    pub certificates: CurveCertificates,
    pub fields: CurveFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyEntry {
    pub eps_coarse: f64,
    pub eps_fine: f64,
    /// `sup_s |ẑ_coarse(s) - ẑ_fine(s)|_V` on the common grid.
    pub z_sup: f64,
    pub t_sup: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Levels ordered by decreasing viscosity.
    pub levels: Vec<Level>,
    pub cauchy: Vec<CauchyEntry>,
    /// First table index from which the `z_sup` column strictly decreases.
    pub convergent_from: usize,
    pub converged: bool,
    pub resample_points: usize,
    /// Total arc lengths `S_ε` along the ladder.
    pub lengths: Vec<f64>,
    /// `S_ε` is nonincreasing as `ε` decreases.
    pub lengths_monotone: bool,
    /// Linear-in-ε extrapolation of the final state from the two finest levels.
    pub extrapolated_final_state: Option<Vec<f64>>,
}

impl SweepResult {
    /// The finest level, which stands in for the limit curve.
    pub fn limit(&self) -> &Level {
        self.levels.last().expect("sweep has at least one level")
    }
}

/// Solves, reparameterizes and certifies one viscosity level.
pub fn run_level(system: &System, z0: &[f64], eps: f64, opts: &SweepOptions) -> Result<Level> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveViscosity(eps));
    }
    let load = system.load();
    let partition = match opts.steps {
        Some(n) => Partition::uniform(load.start(), load.horizon(), n)?,
        None => Partition::with_max_step(load.start(), load.horizon(), opts.mesh.max_step(eps))?,
    };
    let constants = estimate_constants(system, z0, eps)?;
    let mut solve = opts.solve;
    solve.lambda = solve.lambda.max(constants.lambda);
    let trajectory = solve_trajectory(system, &partition, eps, z0, &solve)?;
    let mut ledger = check_basic_estimates(system, &trajectory, &constants);
    ledger.extend(check_bv_estimates(system, &trajectory, &constants));
    ledger.push(check_inclusion(&trajectory, opts.tol_inner));
    let edp = check_discrete_edp(system, &trajectory, constants.lambda)?;
    ledger.push(edp.entry());
    let curve = reparameterize(system, &trajectory, opts.sub_nodes)?;
    let (certificates, fields) = certify(system, &curve, &opts.certify)?;
    Ok(Level {
        eps,
        trajectory,
        constants,
        ledger,
        edp,
        curve,
        certificates,
        fields,
    })
}

/// Runs the whole viscosity ladder (in parallel) and tabulates the Cauchy
/// differences of consecutive curves on a common uniform arc-length grid.
pub fn sweep(system: &System, z0: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    if opts.eps_ladder.is_empty() {
        return Err(Error::SweepNotConverged("empty viscosity ladder".into()));
    }
    let mut ladder = opts.eps_ladder.clone();
    ladder.sort_by(|a, b| b.total_cmp(a));
    ladder.dedup();
    let levels: Vec<Level> = ladder
        .par_iter()
        .map(|&eps| run_level(system, z0, eps, opts))
        .collect::<Result<_>>()?;

    let lengths: Vec<f64> = levels.iter().map(|l| l.curve.total_length()).collect();
    let s_max = lengths.iter().cloned().fold(0.0, f64::max);
    let points = levels
        .iter()
        .map(|l| l.curve.len())
        .max()
        .unwrap()
        .min(opts.max_resample_points);
    let grid = uniform_grid(s_max, points);
    let sampled: Vec<_> = levels
        .par_iter()
        .map(|l| resample(&l.curve, &grid))
        .collect();
    let metric = &system.metric;
    let cauchy: Vec<CauchyEntry> = (1..levels.len())
        .map(|i| {
            let (a, b) = (&sampled[i - 1], &sampled[i]);
            let mut z_sup: f64 = 0.0;
            let mut t_sup: f64 = 0.0;
            for q in 0..grid.len() {
                let d: Vec<f64> = a.z_hat[q]
                    .iter()
                    .zip(&b.z_hat[q])
                    .map(|(x, y)| x - y)
                    .collect();
                z_sup = z_sup.max(metric.norm(&d));
                t_sup = t_sup.max((a.t_hat[q] - b.t_hat[q]).abs());
            }
            CauchyEntry {
                eps_coarse: levels[i - 1].eps,
                eps_fine: levels[i].eps,
                z_sup,
                t_sup,
            }
        })
        .collect();
    // Differences at rounding level count as decreasing (identical curves).
    let scale = levels
        .iter()
        .flat_map(|l| l.curve.z_hat.iter().map(|z| metric.norm(z)))
        .fold(1.0, f64::max);
    let floor = CAUCHY_ROUNDING * scale;
    let decreasing = |i: usize| cauchy[i].z_sup < cauchy[i - 1].z_sup || cauchy[i].z_sup <= floor;
    let mut convergent_from = cauchy.len().saturating_sub(1);
    while convergent_from > 0 && decreasing(convergent_from) {
        convergent_from -= 1;
    }
    let converged = cauchy.len() < 2 || decreasing(cauchy.len() - 1);
    let lengths_monotone = lengths.windows(2).all(|w| w[1] <= w[0]);
    let extrapolated_final_state = (levels.len() >= 2).then(|| {
        let (c, f) = (&levels[levels.len() - 2], &levels[levels.len() - 1]);
        richardson(
            c.eps,
            c.trajectory.final_state(),
            f.eps,
            f.trajectory.final_state(),
        )
    });
    Ok(SweepResult {
        levels,
        cauchy,
        convergent_from,
        converged,
        resample_points: grid.len(),
        lengths,
        lengths_monotone,
        extrapolated_final_state,
    })
}

/// Value at `ε = 0` of the line through `(eps_a, a)` and `(eps_b, b)`.
pub fn richardson(eps_a: f64, a: &[f64], eps_b: f64, b: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| (eps_a * y - eps_b * x) / (eps_a - eps_b))
        .collect()
}
