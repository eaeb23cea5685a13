use crate::error::{Error, Result};
use crate::linalg::{lerp, sub};

/// Continuous curve, affine between consecutive grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCurve {
    grid: Vec<f64>,
    /// Node values, row-major (`grid.len() x dim`).
    values: Vec<f64>,
    dim: usize,
}

impl PiecewiseLinearCurve {
    pub fn new(grid: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidLoad(format!(
                "curve needs matching grid and values with at least two nodes (got {} and {})",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidLoad(
                "curve grid must be strictly increasing".into(),
            ));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidLoad(
                "curve values have inconsistent dimension".into(),
            ));
        }
        Ok(Self {
            grid,
            values: values.into_iter().flatten().collect(),
            dim,
        })
    }

    /// Scalar curve from `(s, value)` pairs.
    pub fn scalar(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Index `j` of the segment `[grid[j], grid[j+1]]` containing `s`
    /// (clamped to the ends).
    pub fn segment_of(&self, s: f64) -> usize {
        let i = self.grid.partition_point(|g| *g <= s);
        i.saturating_sub(1).min(self.grid.len() - 2)
    }

    /// Value at `s`, extended constantly outside the grid.
    pub fn eval(&self, s: f64) -> Vec<f64> {
        if s <= self.start() {
            return self.node(0).to_vec();
        }
        if s >= self.end() {
            return self.node(self.len() - 1).to_vec();
        }
        let j = self.segment_of(s);
        let theta = (s - self.grid[j]) / (self.grid[j + 1] - self.grid[j]);
        lerp(self.node(j), self.node(j + 1), theta)
    }

    /// Constant derivative on segment `j`.
    pub fn slope(&self, j: usize) -> Vec<f64> {
        let h = self.grid[j + 1] - self.grid[j];
        sub(self.node(j + 1), self.node(j))
            .into_iter()
            .map(|x| x / h)
            .collect()
    }

    pub fn increment(&self, j: usize) -> Vec<f64> {
        sub(self.node(j + 1), self.node(j))
    }

    /// Variation on `[a, b]` for a seminorm `norm`, exact for piecewise affine curves.
    pub fn variation_with(&self, norm: impl Fn(&[f64]) -> f64, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.start()), b.min(self.end()));
        if !(a < b) {
            return 0.0;
        }
        let mut total = 0.0;
        for j in 0..self.len() - 1 {
            let (lo, hi) = (self.grid[j].max(a), self.grid[j + 1].min(b));
            if lo < hi {
                let h = self.grid[j + 1] - self.grid[j];
                total += norm(&self.increment(j)) * (hi - lo) / h;
            }
        }
        total
    }

    pub fn sup_with(&self, norm: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes().map(&norm).fold(0.0, f64::max)
    }

    /// Largest segment slope under `norm`.
    pub fn lipschitz_with(&self, norm: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len() - 1)
            .map(|j| norm(&self.slope(j)))
            .fold(0.0, f64::max)
    }

    /// Restriction to `[a, b]` with the end values interpolated.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a < self.start() || b > self.end() {
            return Err(Error::DomainMismatch {
                a0: a,
                a1: b,
                b0: self.start(),
                b1: self.end(),
            });
        }
        let mut grid = vec![a];
        let mut values = vec![self.eval(a)];
        for (j, g) in self.grid.iter().enumerate() {
            if *g > a && *g < b {
                grid.push(*g);
                values.push(self.node(j).to_vec());
            }
        }
        grid.push(b);
        values.push(self.eval(b));
        Self::new(grid, values)
    }
}
