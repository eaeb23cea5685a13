use crate::error::{Error, Result};
use crate::linalg::{lerp, sub};
use crate::load::{BvLoad, PiecewiseLinearCurve};

/// Raw arc-length parameterized curve: everything certificates are computed from.
///
/// Nodes carry `(s, t̂, ẑ)`; the load `ℓ̂` is constant on every segment
/// `(s_j, s_{j+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub eps: f64,
    pub s: Vec<f64>,
    pub t_hat: Vec<f64>,
    pub z_hat: Vec<Vec<f64>>,
    /// `ℓ̂` on segment `j`.
    pub ell_hat: Vec<Vec<f64>>,
    /// Node `j` is a partition node of the underlying trajectory.
    pub grid_node: Vec<bool>,
    /// Per-node share of the arc-length quadrature error estimate (nonzero at partition nodes).
    pub quad_err: Vec<f64>,
}

impl CurveData {
    pub fn validate(&self) -> Result<()> {
        let n = self.s.len();
        let ok = n >= 2
            && self.t_hat.len() == n
            && self.z_hat.len() == n
            && self.grid_node.len() == n
            && self.quad_err.len() == n
            && self.ell_hat.len() == n - 1;
        if !ok {
            return Err(Error::ReparameterizationFailed(
                "inconsistent curve arrays".into(),
            ));
        }
        if self.s.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::ReparameterizationFailed(
                "arc length is not strictly increasing".into(),
            ));
        }
        if self.t_hat.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::ReparameterizationFailed(
                "time is decreasing along the curve".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.z_hat[0].len()
    }

    pub fn total_length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn horizon(&self) -> f64 {
        *self.t_hat.last().unwrap()
    }

    pub fn z_curve(&self) -> PiecewiseLinearCurve {
        PiecewiseLinearCurve::new(self.s.clone(), self.z_hat.clone()).expect("validated curve")
    }

    /// `ℓ̂` as a right-continuous piecewise constant load over `[0, S]`.
    pub fn ell_hat_load(&self) -> Result<BvLoad> {
        // Merge equal neighbours so the breakpoints are the genuine switches.
        let mut bps = vec![self.s[0]];
        let mut vals: Vec<Vec<f64>> = vec![self.ell_hat[0].clone()];
        for j in 1..self.ell_hat.len() {
            if self.ell_hat[j] != *vals.last().unwrap() {
                bps.push(self.s[j]);
                vals.push(self.ell_hat[j].clone());
            }
        }
        bps.push(self.total_length());
        BvLoad::piecewise_constant(bps, vals)
    }

    pub fn segment_of(&self, s: f64) -> usize {
        let i = self.s.partition_point(|x| *x <= s);
        i.saturating_sub(1).min(self.s.len() - 2)
    }

    /// `(t̂(s), ẑ(s))`, extended constantly past the ends.
    pub fn eval(&self, s: f64) -> (f64, Vec<f64>) {
        if s <= self.s[0] {
            return (self.t_hat[0], self.z_hat[0].clone());
        }
        let n = self.len();
        if s >= self.s[n - 1] {
            return (self.t_hat[n - 1], self.z_hat[n - 1].clone());
        }
        let j = self.segment_of(s);
        let theta = (s - self.s[j]) / (self.s[j + 1] - self.s[j]);
        (
            self.t_hat[j] + theta * (self.t_hat[j + 1] - self.t_hat[j]),
            lerp(&self.z_hat[j], &self.z_hat[j + 1], theta),
        )
    }

    /// `(t̂′, ẑ′)` on segment `j`.
    pub fn rates(&self, j: usize) -> (f64, Vec<f64>) {
        let h = self.s[j + 1] - self.s[j];
        let dz = sub(&self.z_hat[j + 1], &self.z_hat[j]);
        (
            (self.t_hat[j + 1] - self.t_hat[j]) / h,
            dz.into_iter().map(|x| x / h).collect(),
        )
    }
}

/// A curve sampled on a uniform arc-length grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub s: Vec<f64>,
    pub t_hat: Vec<f64>,
    pub z_hat: Vec<Vec<f64>>,
}

pub fn uniform_grid(length: f64, points: usize) -> Vec<f64> {
    let m = points.max(2) - 1;
    (0..=m).map(|i| length * i as f64 / m as f64).collect()
}

pub fn resample(curve: &CurveData, grid: &[f64]) -> Resampled {
    let mut t_hat = Vec::with_capacity(grid.len());
    let mut z_hat = Vec::with_capacity(grid.len());
    for &s in grid {
        let (t, z) = curve.eval(s);
        t_hat.push(t);
        z_hat.push(z);
    }
    Resampled {
        s: grid.to_vec(),
        t_hat,
        z_hat,
    }
}
