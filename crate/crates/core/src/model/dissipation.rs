use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf};
use crate::model::operator::SpdOperator;

/// Projection tolerance and iteration cap for the non-diagonal metric.
pub const PROJECTION_TOL: f64 = 1e-10;
pub const PROJECTION_MAX_ITER: usize = 10_000;

/// Largest dimension for which the dual diameter of the box is computed by
/// vertex enumeration.
const VERTEX_ENUMERATION_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    WeightedL1,
}

/// Weighted l1 dissipation `R(v) = sum r_i |v_i|`. Its subdifferential at the
/// origin is the box `prod [-r_i, r_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    weights: Vec<f64>,
    kind: GaugeKind,
}

/// Result of projecting a covector onto the elastic box in the dual metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub distance: f64,
    pub point: Vec<f64>,
}

impl Dissipation {
    pub fn weighted_l1(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDissipation("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidDissipation(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        Ok(Self {
            weights,
            kind: GaugeKind::WeightedL1,
        })
    }

    pub fn uniform(dim: usize, r: f64) -> Result<Self> {
        Self::weighted_l1(vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn value(&self, v: &[f64]) -> f64 {
        self.weights.iter().zip(v).map(|(r, x)| r * x.abs()).sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Whether `w` lies in the box, up to `tol` per coordinate.
    pub fn contains(&self, w: &[f64], tol: f64) -> bool {
        self.weights.iter().zip(w).all(|(r, x)| x.abs() <= r + tol)
    }

    pub fn clamp(&self, w: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(w)
            .map(|(r, x)| x.clamp(-r, *r))
            .collect()
    }

    /// Distance from `w` to the box in the dual metric of `metric` together
    /// with the closest box point.
    pub fn dist(&self, metric: &SpdOperator, w: &[f64]) -> Result<Projection> {
        check_dim(self.dim(), metric.dim())?;
        check_dim(self.dim(), w.len())?;
        if metric.is_diagonal() {
            let point = self.clamp(w);
            let d2: f64 = (0..w.len())
                .map(|i| {
                    let e = w[i] - point[i];
                    e * e / metric.entry(i, i)
                })
                .sum();
            return Ok(Projection {
                distance: d2.sqrt(),
                point,
            });
        }
        self.project_dense(metric, w)
    }

    /// Convenience wrapper returning only the distance.
    pub fn distance(&self, metric: &SpdOperator, w: &[f64]) -> Result<f64> {
        Ok(self.dist(metric, w)?.distance)
    }

    /// Accelerated projected gradient on `xi -> |w - xi|^2_{V*}` over the box,
    /// followed by an exact solve on the detected free set.
    fn project_dense(&self, metric: &SpdOperator, w: &[f64]) -> Result<Projection> {
        let n = w.len();
        // Gradient of 0.5 |w - xi|^2_{V*} is -V^{-1}(w - xi), Lipschitz with 1/ellipticity.
        let step = metric.ellipticity();
        let mut xi = self.clamp(w);
        let mut y = xi.clone();
        let mut t = 1.0_f64;
        let mut residual = f64::INFINITY;
        let scale = 1.0_f64.max(norm_inf(w));
        for _ in 0..PROJECTION_MAX_ITER {
            let g = grad(metric, w, &y);
            let next: Vec<f64> = (0..n).map(|i| y[i] - step * g[i]).collect();
            let next = self.clamp(&next);
            // Fixed-point residual of the projected gradient map at the new iterate.
            let gn = grad(metric, w, &next);
            let probe = self.clamp(&(0..n).map(|i| next[i] - step * gn[i]).collect::<Vec<_>>());
            residual = (0..n)
                .map(|i| (probe[i] - next[i]).abs())
                .fold(0.0, f64::max);
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            // Restart momentum when the objective would increase.
            let restart = dot(&g, &crate::linalg::sub(&next, &xi)) > 0.0;
            y = if restart {
                t = 1.0;
                next.clone()
            } else {
                t = t_next;
                (0..n).map(|i| next[i] + beta * (next[i] - xi[i])).collect()
            };
            xi = next;
            if residual <= PROJECTION_TOL * scale {
                break;
            }
        }
        if let Some(polished) = self.polish(metric, w, &xi) {
            xi = polished;
            residual = self.kkt_residual(metric, w, &xi);
        }
        if residual > PROJECTION_TOL * scale {
            return Err(Error::ProjectionNotConverged { residual });
        }
        let e: Vec<f64> = (0..n).map(|i| w[i] - xi[i]).collect();
        Ok(Projection {
            distance: metric.dual_norm(&e),
            point: xi,
        })
    }

    /// Re-solves the free coordinates exactly with the active bounds fixed.
    fn polish(&self, metric: &SpdOperator, w: &[f64], xi: &[f64]) -> Option<Vec<f64>> {
        let n = w.len();
        let free: Vec<usize> = (0..n)
            .filter(|&i| xi[i].abs() < self.weights[i] * (1.0 - 1e-12))
            .collect();
        let mut out = xi.to_vec();
        if !free.is_empty() {
            // Stationarity on the free set: (V^{-1}(w - xi))_F = 0.
            let k = free.len();
            let mut m = nalgebra::DMatrix::<f64>::zeros(k, k);
            let mut rhs = nalgebra::DVector::<f64>::zeros(k);
            for (a, &i) in free.iter().enumerate() {
                let mut r = 0.0;
                for j in 0..n {
                    let inv = metric.inverse_entry(i, j);
                    if free.contains(&j) {
                        continue;
                    }
                    r += inv * (w[j] - xi[j]);
                }
                for (b, &j) in free.iter().enumerate() {
                    m[(a, b)] = metric.inverse_entry(i, j);
                    r += metric.inverse_entry(i, j) * w[j];
                }
                rhs[a] = r;
            }
            let sol = m.lu().solve(&rhs)?;
            for (a, &i) in free.iter().enumerate() {
                out[i] = sol[a];
            }
        }
        if !self.contains(&out, 0.0) {
            return None;
        }
        let before = self.kkt_residual(metric, w, xi);
        let after = self.kkt_residual(metric, w, &out);
        (after <= before).then_some(out)
    }

    fn kkt_residual(&self, metric: &SpdOperator, w: &[f64], xi: &[f64]) -> f64 {
        let n = w.len();
        let step = metric.ellipticity();
        let g = grad(metric, w, xi);
        let probe = self.clamp(&(0..n).map(|i| xi[i] - step * g[i]).collect::<Vec<_>>());
        (0..n).map(|i| (probe[i] - xi[i]).abs()).fold(0.0, f64::max)
    }

    /// `R*_eps(w) = dist(w)^2 / (2 eps)`
    pub fn conjugate_viscous(&self, metric: &SpdOperator, eps: f64, w: &[f64]) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveViscosity(eps));
        }
        let d = self.distance(metric, w)?;
        Ok(d * d / (2.0 * eps))
    }

    /// `R_eps(v) = R(v) + eps/2 |v|_V^2`
    pub fn viscous_value(&self, metric: &SpdOperator, eps: f64, v: &[f64]) -> f64 {
        self.value(v) + 0.5 * eps * metric.quad(v)
    }

    /// Vanishing-viscosity contact potential `R(v) + |v|_V dist(w)`.
    pub fn contact_potential(&self, metric: &SpdOperator, v: &[f64], w: &[f64]) -> Result<f64> {
        let nv = metric.norm(v);
        if nv == 0.0 {
            return Ok(0.0);
        }
        Ok(self.value(v) + nv * self.distance(metric, w)?)
    }

    /// Diameter of the box in the dual metric.
    pub fn dual_diameter(&self, metric: &SpdOperator) -> f64 {
        let n = self.dim();
        if metric.is_diagonal() {
            let s: f64 = (0..n)
                .map(|i| self.weights[i] * self.weights[i] / metric.entry(i, i))
                .sum();
            return 2.0 * s.sqrt();
        }
        if n <= VERTEX_ENUMERATION_MAX_DIM {
            let mut best = 0.0_f64;
            let mut v = vec![0.0; n];
            for mask in 0u32..(1u32 << n) {
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = if mask & (1 << i) != 0 {
                        self.weights[i]
                    } else {
                        -self.weights[i]
                    };
                }
                best = best.max(metric.dual_norm(&v));
            }
            return 2.0 * best;
        }
        let s: f64 = self.weights.iter().map(|r| r * r).sum();
        2.0 * (s / metric.ellipticity()).sqrt()
    }

    /// `sup |v|_V / R(v)`, attained at the vertices `e_i / r_i` of the unit ball of `R`.
    pub fn metric_per_gauge(&self, metric: &SpdOperator) -> f64 {
        (0..self.dim())
            .map(|i| metric.entry(i, i).sqrt() / self.weights[i])
            .fold(0.0, f64::max)
    }
}

fn grad(metric: &SpdOperator, w: &[f64], xi: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = w.iter().zip(xi).map(|(a, b)| a - b).collect();
    metric.solve(&e).into_iter().map(|x| -x).collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
