//! Certificates of a reparameterized curve: jump set, multiplier, normalization,
//! energy-dissipation identity and the characterization of `ℓ̂` on fibers.
//!
//! Everything here is a pure function of the stored curve and the model, so a
//! curve read back from disk reproduces the original report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ledger::finite_or_null;
use crate::linalg::{dot, lerp, sub};
use crate::load::kurzweil::bv_dg_cumulative;
use crate::model::System;
use crate::viscosity::curve::CurveData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    /// Floor of the jump threshold relative to the dual diameter of `∂R(0)`.
    pub delta_g_floor: f64,
    /// Coefficient of `ε^exponent · diam` in the jump threshold.
    pub delta_g_scale: f64,
    pub delta_g_exponent: f64,
    /// Below this `|ẑ′|_V` a segment inside the jump set is flagged degenerate.
    pub rate_floor: f64,
    /// Safety factor on the doubling estimate of the quadrature error.
    pub quadrature_safety: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            delta_g_floor: 1e-6,
            delta_g_scale: 3.0,
            delta_g_exponent: 0.75,
            rate_floor: 1e-12,
            quadrature_safety: 2.0,
        }
    }
}

impl CertifyOptions {
    /// `δ_G(ε) = (floor + scale · ε^exponent) · diam`. Off the jump set the
    /// stress distance of a viscous solution is `ε |ż|_V`; across a fold the
    /// delayed loss of stability already carries a distance of order `ε^{2/3}`.
    /// An exponent strictly between the two separates both regimes.
    pub fn delta_g(&self, eps: f64, diam: f64) -> f64 {
        (self.delta_g_floor + self.delta_g_scale * eps.max(0.0).powf(self.delta_g_exponent)) * diam
    }
}

/// Node and segment fields of a certified curve (used by the exporter).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFields {
    /// Stress distance with the designated value `ℓ̂(s)`.
    pub dist: Vec<f64>,
    /// `min` of the stress distance over `ℓ̂(s-)`, `ℓ̂(s)`, `ℓ̂(s+)`.
    pub m: Vec<f64>,
    pub in_g: Vec<bool>,
    pub t_rate: Vec<f64>,
    pub r_rate: Vec<f64>,
    pub v_rate: Vec<f64>,
    /// Trapezoidal mean of the stress distance on the segment.
    pub dist_mean: Vec<f64>,
    /// Multiplier on segments inside the jump set, `NaN` elsewhere.
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GInterval {
    pub s_start: f64,
    pub s_end: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub first_node: usize,
    pub last_node: usize,
}

impl GInterval {
    pub fn t_range(&self) -> f64 {
        self.t_end - self.t_start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdiBudget {
    /// Safety factor times the summed doubling estimates.
    pub quadrature: f64,
    /// Summed Fenchel gaps at the partition nodes.
    pub inner_solver: f64,
    /// Summed per-step bounds `2 |Δz|_V ∫ |DI(z(θ)) - DI(z_k)|_{V*} dθ` on the
    /// contact-potential defect along affine pieces.
    pub consistency: f64,
    pub rounding: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdiCertificate {
    pub max_abs_residual: f64,
    pub max_residual: f64,
    pub min_residual: f64,
    pub budget: EdiBudget,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpCharacterization {
    pub t: f64,
    /// Arc-length positions where `ℓ̂` switches from the left to the right limit.
    pub s_switch: Vec<f64>,
    pub switches: usize,
    /// Largest `V*`-distance from `ℓ̂` on the fiber window to the nearest of
    /// `l(t-)`, `l(t)`, `l(t+)`.
    pub value_defect: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveCertificates {
    pub eps: f64,
    pub nodes: usize,
    pub length: f64,
    pub delta_g: f64,
    pub g_intervals: Vec<GInterval>,
    /// Arc-length measure of the jump set.
    pub g_measure: f64,
    /// Jump-set measure at half and at twice the threshold.
    pub g_measure_sensitivity: [f64; 2],
    /// `max |t̂′ + R[ẑ′] + |ẑ′|_V dist - 1|` over segments.
    pub normalization: f64,
    /// Same with the stress term restricted to the detected jump set.
    pub normalization_g_only: f64,
    /// Largest inclusion residual of the extracted multiplier, `null` without jump nodes.
    #[serde(serialize_with = "finite_or_null")]
    pub lambda_residual: f64,
    pub lambda_checked: usize,
    pub degenerate_rates: usize,
    pub edi: EdiCertificate,
    /// `L^2(0, S)` norm of `t̂′ · dist`.
    pub complementarity: f64,
    pub characterization: Vec<JumpCharacterization>,
}

/// Computes every certificate of `curve` for `system`.
pub fn certify(
    system: &System,
    curve: &CurveData,
    opts: &CertifyOptions,
) -> Result<(CurveCertificates, CurveFields)> {
    curve.validate()?;
    if curve.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: curve.dim(),
        });
    }
    let metric = &system.metric;
    let diss = &system.dissipation;
    let n = curve.len();
    let segs = n - 1;

    // Stress distance at node j with the loads of the adjacent segments.
    let mut dist_left = vec![f64::NAN; n];
    let mut dist_right = vec![f64::NAN; n];
    for j in 0..n {
        if j > 0 {
            dist_left[j] = system.stress_distance(&curve.ell_hat[j - 1], &curve.z_hat[j])?;
        }
        if j < segs {
            dist_right[j] = if j > 0 && curve.ell_hat[j] == curve.ell_hat[j - 1] {
                dist_left[j]
            } else {
                system.stress_distance(&curve.ell_hat[j], &curve.z_hat[j])?
            };
        }
    }
    let dist: Vec<f64> = (0..n)
        .map(|j| {
            if j < segs {
                dist_right[j]
            } else {
                dist_left[j]
            }
        })
        .collect();
    let m: Vec<f64> = (0..n)
        .map(|j| match (j > 0, j < segs) {
            (true, true) => dist_left[j].min(dist_right[j]),
            (true, false) => dist_left[j],
            _ => dist_right[j],
        })
        .collect();

    let mut t_rate = Vec::with_capacity(segs);
    let mut r_rate = Vec::with_capacity(segs);
    let mut v_rate = Vec::with_capacity(segs);
    let mut dist_mean = Vec::with_capacity(segs);
    for j in 0..segs {
        let (tp, zp) = curve.rates(j);
        t_rate.push(tp);
        r_rate.push(diss.value(&zp));
        v_rate.push(metric.norm(&zp));
        dist_mean.push(0.5 * (dist_right[j] + dist_left[j + 1]));
    }

    let diam = diss.dual_diameter(metric);
    let delta_g = opts.delta_g(curve.eps, diam);
    let in_g = g_mask(curve, &m, delta_g);
    let seg_in_g = |mask: &[bool], j: usize| mask[j] && mask[j + 1];
    let g_intervals = intervals(curve, &in_g);
    let measure = |mask: &[bool]| -> f64 {
        (0..segs)
            .filter(|j| seg_in_g(mask, *j))
            .map(|j| curve.s[j + 1] - curve.s[j])
            .sum()
    };
    let g_measure = measure(&in_g);
    let sens = [0.5, 2.0].map(|f| measure(&g_mask(curve, &m, f * delta_g)));

    let mut normalization: f64 = 0.0;
    let mut normalization_g_only: f64 = 0.0;
    let mut lambda = vec![f64::NAN; segs];
    let mut degenerate = 0;
    let mut complementarity = 0.0;
    for j in 0..segs {
        let h = curve.s[j + 1] - curve.s[j];
        let stress = v_rate[j] * dist_mean[j];
        normalization = normalization.max((t_rate[j] + r_rate[j] + stress - 1.0).abs());
        let g = seg_in_g(&in_g, j);
        normalization_g_only = normalization_g_only
            .max((t_rate[j] + r_rate[j] + if g { stress } else { 0.0 } - 1.0).abs());
        if g {
            if v_rate[j] < opts.rate_floor {
                degenerate += 1;
            } else {
                lambda[j] = dist_mean[j] / v_rate[j];
            }
        }
        complementarity += h * (t_rate[j] * dist_mean[j]).powi(2);
    }

    // The multiplier is tested where the discrete inclusion holds: at partition
    // nodes inside the jump set, against the incoming segment.
    let mut lambda_residual = f64::NEG_INFINITY;
    let mut lambda_checked = 0;
    for j in 1..n {
        if !(curve.grid_node[j] && in_g[j] && in_g[j - 1]) {
            continue;
        }
        let (_, zp) = curve.rates(j - 1);
        let vn = metric.norm(&zp);
        if vn < opts.rate_floor {
            continue;
        }
        let lam = dist_left[j] / vn;
        let vz = metric.apply(&zp);
        let grad = system.energy.grad_internal(&curve.z_hat[j]);
        let sigma: Vec<f64> = (0..zp.len())
            .map(|i| curve.ell_hat[j - 1][i] - grad[i] - lam * vz[i])
            .collect();
        lambda_residual = lambda_residual.max(subdifferential_violation(system, &zp, &sigma));
        lambda_checked += 1;
    }
    if lambda_checked == 0 {
        lambda_residual = f64::INFINITY;
    }

    let edi = certify_edi(system, curve, &dist_left, &dist_mean, opts)?;
    let characterization = characterize_ell_hat(system, curve, &g_intervals)?;

    Ok((
        CurveCertificates {
            eps: curve.eps,
            nodes: n,
            length: curve.total_length(),
            delta_g,
            g_intervals,
            g_measure,
            g_measure_sensitivity: sens,
            normalization,
            normalization_g_only,
            lambda_residual,
            lambda_checked,
            degenerate_rates: degenerate,
            edi,
            complementarity: complementarity.sqrt(),
            characterization,
        },
        CurveFields {
            dist,
            m,
            in_g,
            t_rate,
            r_rate,
            v_rate,
            dist_mean,
            lambda,
        },
    ))
}

/// `𝗆 > δ` decided at partition nodes. Interior quadrature nodes pair
/// interpolated states with the load at the step end, an `O(τ)` excess in the
/// stress distance, so they inherit membership from the ends of their step.
fn g_mask(curve: &CurveData, m: &[f64], delta: f64) -> Vec<bool> {
    let n = curve.len();
    let mut mask = vec![false; n];
    let mut start = 0;
    for k in 1..n {
        if !curve.grid_node[k] {
            continue;
        }
        let (a, b) = (m[start] > delta, m[k] > delta);
        mask[start] = a;
        mask[k] = b;
        for node in mask.iter_mut().take(k).skip(start + 1) {
            *node = a || b;
        }
        start = k;
    }
    mask
}

/// Maximal runs of jump-set nodes spanning at least one segment (the jump set
/// is open, so isolated nodes carry no interval).
fn intervals(curve: &CurveData, in_g: &[bool]) -> Vec<GInterval> {
    let mut out = Vec::new();
    let mut j = 0;
    while j < in_g.len() {
        if !in_g[j] {
            j += 1;
            continue;
        }
        let first = j;
        while j + 1 < in_g.len() && in_g[j + 1] {
            j += 1;
        }
        if j == first {
            j += 1;
            continue;
        }
        out.push(GInterval {
            s_start: curve.s[first],
            s_end: curve.s[j],
            t_start: curve.t_hat[first],
            t_end: curve.t_hat[j],
            first_node: first,
            last_node: j,
        });
        j += 1;
    }
    out
}

/// `V*`-norm of the componentwise violation of `sigma ∈ ∂R(v)`.
fn subdifferential_violation(system: &System, v: &[f64], sigma: &[f64]) -> f64 {
    let r = system.dissipation.weights();
    let scale = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let e: Vec<f64> = (0..v.len())
        .map(|i| {
            if v[i].abs() > 1e-10 * scale {
                sigma[i] - r[i] * v[i].signum()
            } else {
                sigma[i] - sigma[i].clamp(-r[i], r[i])
            }
        })
        .collect();
    system.metric.dual_norm(&e)
}

/// `I(ẑ(s)) + ∫ R[ẑ′] + |ẑ′|_V dist - I(ẑ(0)) - ∫ <ℓ̂, dẑ>` at every node.
///
/// The stress term is integrated over the whole curve: it vanishes off the jump
/// set of the limit, and at positive viscosity it is the exact contact potential.
fn certify_edi(
    system: &System,
    curve: &CurveData,
    dist_left: &[f64],
    dist_mean: &[f64],
    opts: &CertifyOptions,
) -> Result<EdiCertificate> {
    let metric = &system.metric;
    let energy = &system.energy;
    let n = curve.len();
    let power = bv_dg_cumulative(&curve.ell_hat_load()?, &curve.z_curve())?;
    let i0 = energy.internal(&curve.z_hat[0]);
    let mut acc = 0.0;
    let mut magnitude = i0.abs();
    let mut max_abs: f64 = 0.0;
    let mut max_res = f64::NEG_INFINITY;
    let mut min_res = f64::INFINITY;
    for j in 0..n {
        if j > 0 {
            let dz = sub(&curve.z_hat[j], &curve.z_hat[j - 1]);
            let piece = system.dissipation.value(&dz) + metric.norm(&dz) * dist_mean[j - 1];
            acc += piece;
            magnitude += piece.abs();
        }
        let ij = energy.internal(&curve.z_hat[j]);
        let res = ij + acc - i0 - power[j];
        max_abs = max_abs.max(res.abs());
        max_res = max_res.max(res);
        min_res = min_res.min(res);
    }
    magnitude += power.iter().fold(0.0_f64, |a, x| a.max(x.abs()));

    let mut inner = 0.0;
    let mut consistency = 0.0;
    let mut start = 0;
    for k in (1..n).filter(|k| curve.grid_node[*k]) {
        let (z0, z1) = (&curve.z_hat[start], &curve.z_hat[k]);
        let dz = sub(z1, z0);
        let dzn = metric.norm(&dz);
        if dzn > 0.0 {
            let l = &curve.ell_hat[k - 1];
            let w = sub(l, &energy.grad_internal(z1));
            let gap = system.dissipation.value(&dz) + dzn * dist_left[k] - dot(&w, &dz);
            inner += gap.max(0.0);
            let g1 = energy.grad_internal(z1);
            let pieces = k - start;
            let defect = |theta: f64| {
                metric.dual_norm(&sub(&energy.grad_internal(&lerp(z0, z1, theta)), &g1))
            };
            let mut integral = 0.0;
            let mut prev = defect(0.0);
            for q in 1..=pieces {
                let cur = if q == pieces {
                    0.0
                } else {
                    defect(q as f64 / pieces as f64)
                };
                integral += 0.5 * (prev + cur) / pieces as f64;
                prev = cur;
            }
            consistency += 2.0 * dzn * integral;
        }
        start = k;
    }
    let quadrature = opts.quadrature_safety * curve.quad_err.iter().sum::<f64>();
    let rounding = 1e-12 * (1.0 + magnitude);
    let total = quadrature + inner + consistency + rounding;
    Ok(EdiCertificate {
        max_abs_residual: max_abs,
        max_residual: max_res,
        min_residual: min_res,
        budget: EdiBudget {
            quadrature,
            inner_solver: inner,
            consistency,
            rounding,
            total,
        },
        pass: max_abs <= total,
    })
}

/// Counts the switches of `ℓ̂` between `l(t-)` and `l(t+)` on the fiber window
/// of every jump of the load.
pub fn characterize_ell_hat(
    system: &System,
    curve: &CurveData,
    g_intervals: &[GInterval],
) -> Result<Vec<JumpCharacterization>> {
    let metric = &system.metric;
    let load = system.load();
    let mut max_step: f64 = 0.0;
    let mut last = 0;
    for k in 1..curve.len() {
        if curve.grid_node[k] {
            max_step = max_step.max(curve.t_hat[k] - curve.t_hat[last]);
            last = k;
        }
    }
    let mut out = Vec::new();
    for jump in load.jumps() {
        let t = jump.t;
        let mut half = 2.0 * max_step;
        for g in g_intervals {
            if g.t_end >= t - 2.0 * max_step && g.t_start <= t + 2.0 * max_step {
                half = half.max(2.0 * max_step + g.t_range());
            }
        }
        let mut labels: Vec<(f64, i8)> = Vec::new();
        let mut value_defect: f64 = 0.0;
        for j in 0..curve.len() - 1 {
            let mid = 0.5 * (curve.t_hat[j] + curve.t_hat[j + 1]);
            if (mid - t).abs() > half {
                continue;
            }
            let l = &curve.ell_hat[j];
            let dm = metric.dual_norm(&sub(l, &jump.left));
            let dp = metric.dual_norm(&sub(l, &jump.right));
            let da = metric.dual_norm(&sub(l, &jump.at));
            value_defect = value_defect.max(dm.min(dp).min(da));
            if dm < dp {
                labels.push((curve.s[j], -1));
            } else if dp < dm {
                labels.push((curve.s[j], 1));
            }
        }
        let s_switch: Vec<f64> = labels
            .windows(2)
            .filter(|w| w[0].1 != w[1].1)
            .map(|w| w[1].0)
            .collect();
        let switches = s_switch.len();
        out.push(JumpCharacterization {
            t,
            s_switch,
            switches,
            value_defect,
            pass: switches == 1,
        });
    }
    Ok(out)
}
