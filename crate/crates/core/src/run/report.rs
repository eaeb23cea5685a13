//! `report.json` and `certificates.json`: every inequality and certificate of a
//! run as one `{id, lhs, rhs, margin, pass}` record.

use serde::Serialize;

use crate::ledger::{finite_or_null, LedgerEntry};
use crate::model::System;
use crate::run::config::Tolerances;
use crate::viscosity::{
    CauchyEntry, CurveCertificates, CurveData, CurveFields, Level, SweepResult,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Switch {
    pub t: f64,
    pub s: f64,
}

/// Headline numbers of one curve plus the full certificate record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub eps: f64,
    pub normalization_max: f64,
    pub complementarity_l2: f64,
    pub edi_max: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub lambda_residual_max: f64,
    pub switches: Vec<Switch>,
    pub details: CurveCertificates,
}

impl CertificateSummary {
    pub fn new(c: &CurveCertificates) -> Self {
        Self {
            eps: c.eps,
            normalization_max: c.normalization,
            complementarity_l2: c.complementarity,
            edi_max: c.edi.max_abs_residual,
            lambda_residual_max: c.lambda_residual,
            switches: c
                .characterization
                .iter()
                .flat_map(|j| j.s_switch.iter().map(|s| Switch { t: j.t, s: *s }))
                .collect(),
            details: c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub eps: f64,
    pub steps: usize,
    pub max_step: f64,
    pub nodes: usize,
    pub length: f64,
    pub final_state: Vec<f64>,
    /// `Var_Z(ẑ)` in the energy norm; reported, never gating.
    pub var_z: f64,
    pub g_intervals: usize,
    pub inner_iterations: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub cauchy: Vec<CauchyEntry>,
    pub convergent_from: usize,
    pub converged: bool,
    pub resample_points: usize,
    pub lengths: Vec<f64>,
    pub lengths_monotone: bool,
    pub extrapolated_final_state: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem: String,
    pub dim: usize,
    pub seed: u64,
    pub pass: bool,
    pub exit_code: i32,
    pub levels: Vec<LevelSummary>,
    pub sweep: Option<SweepSummary>,
    pub entries: Vec<LedgerEntry>,
}

impl Report {
    pub fn failures(&self) -> Vec<&LedgerEntry> {
        self.entries
            .iter()
            .filter(|e| e.gating && !e.pass)
            .collect()
    }

    /// Plain-text summary for the terminal.
    pub fn render(&self) -> String {
        let mut out = format!(
            "problem {} (n = {}), seed {}\n",
            self.problem, self.dim, self.seed
        );
        for l in &self.levels {
            out += &format!(
                "  eps {:<10} N {:>6}  nodes {:>7}  S {:.6}  G-intervals {}  {}\n",
                l.eps,
                l.steps,
                l.nodes,
                l.length,
                l.g_intervals,
                if l.pass { "ok" } else { "FAIL" }
            );
        }
        if let Some(s) = &self.sweep {
            for c in &s.cauchy {
                out += &format!(
                    "  cauchy {} -> {}: sup|dz| {:.3e}  sup|dt| {:.3e}\n",
                    c.eps_coarse, c.eps_fine, c.z_sup, c.t_sup
                );
            }
            if let Some(z) = &s.extrapolated_final_state {
                out += &format!("  extrapolated final state {z:?}\n");
            }
        }
        let failures = self.failures();
        out += &format!(
            "{} gating checks, {} failed -> {}\n",
            self.entries.iter().filter(|e| e.gating).count(),
            failures.len(),
            if self.pass { "PASS" } else { "FAIL" }
        );
        for f in failures {
            out += &format!("  failed {}: {:e} > {:e}\n", f.id, f.lhs, f.rhs);
        }
        out
    }
}

fn prefixed(eps: f64, mut e: LedgerEntry) -> LedgerEntry {
    e.id = format!("eps={eps}/{}", e.id);
    e
}

/// Certificate records of one curve. Fiber properties decide only on the
/// limit candidate; on coarser curves they are reported.
pub fn certificate_entries(
    system: &System,
    curve: &CurveData,
    fields: &CurveFields,
    c: &CurveCertificates,
    tol: &Tolerances,
    is_limit: bool,
) -> Vec<LedgerEntry> {
    let mut v = vec![
        LedgerEntry::le("normalization", c.normalization, tol.tol_norm),
        LedgerEntry::le(
            "normalization_jump_set_only",
            c.normalization_g_only,
            tol.tol_norm,
        )
        .diagnostic(),
        LedgerEntry::le("complementarity_l2", c.complementarity, tol.tol_comp),
        LedgerEntry::le(
            "energy_dissipation_identity",
            c.edi.max_abs_residual,
            c.edi.budget.total,
        ),
        LedgerEntry::le("degenerate_rates", c.degenerate_rates as f64, 0.0),
    ];
    v.push(if c.lambda_checked > 0 {
        LedgerEntry::le("lambda_inclusion", c.lambda_residual, tol.tol_lambda)
    } else {
        LedgerEntry::le("lambda_inclusion", 0.0, tol.tol_lambda)
    });

    let decrease = curve
        .t_hat
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0, f64::max);
    v.push(LedgerEntry::le("monotone_time", decrease, 0.0));

    // Var_R of the piecewise affine curve against the integrated rate.
    let var_r: f64 = (1..curve.len())
        .map(|j| {
            let d: Vec<f64> = curve.z_hat[j]
                .iter()
                .zip(&curve.z_hat[j - 1])
                .map(|(a, b)| a - b)
                .collect();
            system.dissipation.value(&d)
        })
        .sum();
    let integrated: f64 = (0..curve.len() - 1)
        .map(|j| (curve.s[j + 1] - curve.s[j]) * fields.r_rate[j])
        .sum();
    v.push(LedgerEntry::le(
        "arc_length_consistency",
        (var_r - integrated).abs(),
        1e-12 * (1.0 + var_r),
    ));

    let off_g = (0..curve.len() - 1)
        .filter(|j| !(fields.in_g[*j] && fields.in_g[*j + 1]))
        .map(|j| fields.dist_mean[j])
        .fold(0.0, f64::max);
    v.push(LedgerEntry::le("stress_off_jump_set", off_g, c.delta_g).diagnostic());

    let t_range = c
        .g_intervals
        .iter()
        .map(|g| g.t_range())
        .fold(0.0, f64::max);
    v.push(LedgerEntry::le("fiber_time_range", t_range, f64::INFINITY).diagnostic());

    for j in &c.characterization {
        let e = LedgerEntry::le(
            format!("characterization_t={}", j.t),
            (j.switches as f64 - 1.0).abs(),
            0.0,
        );
        v.push(if is_limit { e } else { e.diagnostic() });
    }
    v.into_iter().map(|e| prefixed(c.eps, e)).collect()
}

pub fn level_summary(system: &System, level: &Level, pass: bool) -> LevelSummary {
    let curve = &level.curve;
    let var_z = (1..curve.len())
        .map(|j| {
            let d: Vec<f64> = curve.z_hat[j]
                .iter()
                .zip(&curve.z_hat[j - 1])
                .map(|(a, b)| a - b)
                .collect();
            system.energy.operator().norm(&d)
        })
        .sum();
    LevelSummary {
        eps: level.eps,
        steps: level.trajectory.partition().steps(),
        max_step: level.trajectory.partition().fineness(),
        nodes: curve.len(),
        length: curve.total_length(),
        final_state: level.trajectory.final_state().to_vec(),
        var_z,
        g_intervals: level.certificates.g_intervals.len(),
        inner_iterations: level.trajectory.total_iterations(),
        pass,
    }
}

/// Every record of a sweep: per-level ledgers and certificates, then the
/// sweep-wide convergence checks.
pub fn sweep_entries(
    system: &System,
    result: &SweepResult,
    tol: &Tolerances,
) -> (Vec<LedgerEntry>, Vec<bool>) {
    let mut entries = Vec::new();
    let mut level_pass = Vec::new();
    let last = result.levels.len() - 1;
    for (i, l) in result.levels.iter().enumerate() {
        let mut mine: Vec<LedgerEntry> = l
            .ledger
            .entries
            .iter()
            .cloned()
            .map(|e| prefixed(l.eps, e))
            .collect();
        mine.extend(certificate_entries(
            system,
            &l.curve,
            &l.fields,
            &l.certificates,
            tol,
            i == last,
        ));
        level_pass.push(mine.iter().all(|e| e.pass || !e.gating));
        entries.extend(mine);
    }
    let n = result.cauchy.len();
    if n >= 2 {
        entries.push(LedgerEntry::le(
            "sweep/cauchy_decreasing",
            result.cauchy[n - 1].z_sup,
            result.cauchy[n - 2].z_sup,
        ));
    }
    let rise = result
        .lengths
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    entries.push(LedgerEntry::le("sweep/arc_length_monotone", rise, 0.0).diagnostic());
    let edi: Vec<f64> = result
        .levels
        .iter()
        .map(|l| l.certificates.edi.max_abs_residual)
        .collect();
    let rounding: Vec<f64> = result
        .levels
        .iter()
        .map(|l| l.certificates.edi.budget.rounding)
        .collect();
    if edi.len() >= 2 {
        let worst = (1..edi.len())
            .map(|i| (edi[i], 1.1 * edi[i - 1] + rounding[i]))
            .collect::<Vec<_>>();
        entries.push(LedgerEntry::worst_of("sweep/edi_residual_decreasing", worst).diagnostic());
    }
    (entries, level_pass)
}
