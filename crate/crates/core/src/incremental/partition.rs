use serde::Serialize;

use crate::error::{Error, Result};

/// Time grid `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    times: Vec<f64>,
}

impl Partition {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidPartition("need at least one step".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition(
                "times must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times })
    }

    /// `n` equal steps on `[start, end]`; nodes are `start + k (end - start) / n`.
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Self> {
        if n == 0 || !(end > start) {
            return Err(Error::InvalidPartition(format!(
                "bad uniform grid [{start}, {end}] with {n} steps"
            )));
        }
        let h = end - start;
        let times = (0..=n)
            .map(|k| {
                if k == n {
                    end
                } else {
                    start + h * k as f64 / n as f64
                }
            })
            .collect();
        Self::new(times)
    }

    /// Fewest equal steps with fineness at most `max_step`.
    pub fn with_max_step(start: f64, end: f64, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::InvalidPartition(format!(
                "bad step bound {max_step}"
            )));
        }
        let ratio = (end - start) / max_step;
        // Absorb rounding in ratios like 1 / 0.0125 = 80.00000000000001.
        let n = (ratio * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Self::uniform(start, end, n)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `τ_k = t_k - t_{k-1}` for `1 <= k <= N`.
    pub fn tau(&self, k: usize) -> f64 {
        self.times[k] - self.times[k - 1]
    }

    pub fn fineness(&self) -> f64 {
        (1..self.times.len())
            .map(|k| self.tau(k))
            .fold(0.0, f64::max)
    }

    pub fn time_scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.times.iter().map(|t| t * factor).collect())
    }

    /// Index `k` of the step `(t_{k-1}, t_k]` containing `t` (1-based; `t_0` maps to 1).
    pub fn step_of(&self, t: f64) -> usize {
        let k = self.times.partition_point(|x| *x < t);
        k.clamp(1, self.steps())
    }
}
