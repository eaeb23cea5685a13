use crate::error::{Error, Result};
use crate::incremental::DiscreteTrajectory;
use crate::linalg::{all_finite, lerp};
use crate::model::System;
use crate::viscosity::curve::CurveData;

/// Sub-nodes per time step used for the arc-length quadrature.
pub const DEFAULT_SUB_NODES: usize = 8;

/// Arc-length reparameterization of the affine interpolant of `traj`.
///
/// Each step `(t_{k-1}, t_k]` is split into `sub_nodes` equal pieces and
/// contributes `ds = dt + R(dz) + |dz|_V dist(l(t_k) - DI(z))`, the stress
/// distance integrated by the trapezoidal rule. The same rule on twice as many
/// pieces yields the per-step quadrature error estimate.
pub fn reparameterize(
    system: &System,
    traj: &DiscreteTrajectory,
    sub_nodes: usize,
) -> Result<CurveData> {
    let m = sub_nodes.max(1);
    let p = traj.partition();
    let n = p.steps();
    let metric = &system.metric;
    let mut data = CurveData {
        eps: traj.eps(),
        s: Vec::with_capacity(n * m + 1),
        t_hat: Vec::with_capacity(n * m + 1),
        z_hat: Vec::with_capacity(n * m + 1),
        ell_hat: Vec::with_capacity(n * m),
        grid_node: Vec::with_capacity(n * m + 1),
        quad_err: Vec::with_capacity(n * m + 1),
    };
    data.s.push(0.0);
    data.t_hat.push(p.start());
    data.z_hat.push(traj.state(0).to_vec());
    data.grid_node.push(true);
    data.quad_err.push(0.0);

    let mut s = 0.0;
    for k in 1..=n {
        let tau = p.tau(k);
        let t0 = p.times()[k - 1];
        let (z0, z1) = (traj.state(k - 1), traj.state(k));
        let lk = traj.load_value(k);
        let dz_norm = metric.norm(&traj.increment(k));
        let r_piece = system.dissipation.value(&traj.increment(k)) / m as f64;
        let dist_at = |theta: f64| system.stress_distance(lk, &lerp(z0, z1, theta));

        let mut d_prev = dist_at(0.0)?;
        let mut coarse = 0.0;
        let mut fine = 0.0;
        for j in 1..=m {
            let theta = j as f64 / m as f64;
            let d = dist_at(theta)?;
            let trap = 0.5 * (d_prev + d);
            if dz_norm > 0.0 {
                let d_mid = dist_at((j as f64 - 0.5) / m as f64)?;
                coarse += trap;
                fine += 0.5 * (0.5 * (d_prev + d_mid) + 0.5 * (d_mid + d));
            }
            let ds = tau / m as f64 + r_piece + dz_norm / m as f64 * trap;
            s += ds;
            if !(ds > 0.0) || !s.is_finite() {
                return Err(Error::ReparameterizationFailed(format!(
                    "non-positive arc-length increment in step {k}"
                )));
            }
            let z = if j == m {
                z1.to_vec()
            } else {
                lerp(z0, z1, theta)
            };
            if !all_finite(&z) {
                return Err(Error::NumericOverflow("state"));
            }
            data.s.push(s);
            data.t_hat.push(if j == m {
                p.times()[k]
            } else {
                t0 + theta * tau
            });
            data.z_hat.push(z);
            data.ell_hat.push(lk.to_vec());
            data.grid_node.push(j == m);
            data.quad_err.push(if j == m {
                dz_norm / m as f64 * (coarse - fine).abs()
            } else {
                0.0
            });
            d_prev = d;
        }
    }
    data.validate()?;
    Ok(data)
}
