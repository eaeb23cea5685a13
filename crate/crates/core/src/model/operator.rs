use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::dot;

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric positive definite operator with a certified lower bound on
/// its Rayleigh quotient. Used both for the elastic operator and for the
/// viscosity metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdOperator {
    dim: usize,
    entries: Vec<f64>,
    inverse: Vec<f64>,
    ellipticity: f64,
    max_eigenvalue: f64,
    diagonal: bool,
    /// Lower Cholesky factor, row-major.
    chol: Vec<f64>,
}

impl SpdOperator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidOperator("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidOperator("non-finite entry".into()));
        }
        let scale = entries
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidOperator(format!(
                        "not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        let m = DMatrix::from_row_slice(dim, dim, &entries);
        let eig = SymmetricEigen::new(m.clone());
        let min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let max = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if !(min > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "not positive definite (smallest eigenvalue {min:e})"
            )));
        }
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidOperator("Cholesky factorization failed".into()))?;
        let inv = chol.inverse();
        let l = chol.l();
        let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || entries[i * dim + j] == 0.0));
        Ok(Self {
            dim,
            inverse: row_major(&inv),
            chol: row_major(&l),
            entries,
            // Eigen solver error is O(n * eps * |M|); shave that off so the
            // bound stays a lower bound.
            ellipticity: min - 8.0 * (dim as f64) * f64::EPSILON * max,
            max_eigenvalue: max,
            diagonal,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is SPD")
    }

    pub fn scalar(dim: usize, c: f64) -> Result<Self> {
        Self::diagonal(&vec![c; dim])
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut e = vec![0.0; n * n];
        for (i, di) in d.iter().enumerate() {
            e[i * n + i] = *di;
        }
        Self::new(n, e)
    }

    /// Tridiagonal second-difference matrix (Dirichlet ends) plus `shift` times
    /// the identity.
    pub fn laplacian_plus_shift(dim: usize, stiffness: f64, shift: f64) -> Result<Self> {
        let mut e = vec![0.0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 2.0 * stiffness + shift;
            if i + 1 < dim {
                e[i * dim + i + 1] = -stiffness;
                e[(i + 1) * dim + i] = -stiffness;
            }
        }
        Self::new(dim, e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim;
        if self.diagonal {
            for (i, o) in out.iter_mut().enumerate().take(n) {
                *o = self.entries[i * n + i] * v[i];
            }
            return;
        }
        for (o, row) in out.iter_mut().zip(self.entries.chunks(n)) {
            *o = dot(row, v);
        }
    }

    /// `M^{-1} sigma`
    pub fn solve(&self, sigma: &[f64]) -> Vec<f64> {
        let n = self.dim;
        if self.diagonal {
            return (0..n).map(|i| sigma[i] / self.entries[i * n + i]).collect();
        }
        (0..n)
            .map(|i| dot(&self.inverse[i * n..(i + 1) * n], sigma))
            .collect()
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> f64 {
        self.inverse[i * self.dim + j]
    }

    /// `<M u, v>`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim;
        if self.diagonal {
            return (0..n).map(|i| self.entries[i * n + i] * u[i] * v[i]).sum();
        }
        self.entries
            .chunks(n)
            .zip(v)
            .map(|(row, vi)| vi * dot(row, u))
            .sum()
    }

    /// `<M v, v>`
    pub fn quad(&self, v: &[f64]) -> f64 {
        self.inner(v, v)
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.quad(v).max(0.0).sqrt()
    }

    /// Dual norm `<sigma, M^{-1} sigma>^{1/2}`.
    pub fn dual_norm(&self, sigma: &[f64]) -> f64 {
        let n = self.dim;
        let q: f64 = if self.diagonal {
            (0..n)
                .map(|i| sigma[i] * sigma[i] / self.entries[i * n + i])
                .sum()
        } else {
            dot(sigma, &self.solve(sigma))
        };
        q.max(0.0).sqrt()
    }

    /// Smallest and largest eigenvalue of the symmetric matrix `m` measured
    /// in this operator's metric, i.e. of `L^{-1} m L^{-T}` with `self = L L^T`.
    pub fn relative_spectrum(&self, m: &[f64]) -> (f64, f64) {
        let n = self.dim;
        debug_assert_eq!(m.len(), n * n);
        if self.diagonal {
            let mut scaled = vec![0.0; n * n];
            let mut all_diag = true;
            for i in 0..n {
                for j in 0..n {
                    let v =
                        m[i * n + j] / (self.entries[i * n + i] * self.entries[j * n + j]).sqrt();
                    if i != j && v != 0.0 {
                        all_diag = false;
                    }
                    scaled[i * n + j] = v;
                }
            }
            if all_diag {
                let it = (0..n).map(|i| scaled[i * n + i]);
                let lo = it.clone().fold(f64::INFINITY, f64::min);
                let hi = it.fold(f64::NEG_INFINITY, f64::max);
                return (lo, hi);
            }
            return extreme_eigenvalues(n, &scaled);
        }
        let l = DMatrix::from_row_slice(n, n, &self.chol);
        let mm = DMatrix::from_row_slice(n, n, m);
        let linv = l
            .clone()
            .try_inverse()
            .expect("Cholesky factor of an SPD matrix is invertible");
        let c = &linv * mm * linv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        extreme_eigenvalues(n, c.as_slice())
    }
}

fn extreme_eigenvalues(n: usize, m: &[f64]) -> (f64, f64) {
    // Symmetric, so column-major and row-major storage agree.
    let eig = SymmetricEigen::new(DMatrix::from_column_slice(n, n, m));
    let lo = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}
