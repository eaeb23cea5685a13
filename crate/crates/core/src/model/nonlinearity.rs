use serde::{Deserialize, Serialize};

use crate::linalg::dot;

/// Lower-order, possibly nonconvex energy contribution `F >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `F = 0`.
    None,
    /// `F(z) = scale * sum_i (z_i^2 - 1)^2 / 4`.
    DoubleWell { scale: f64 },
    /// `F(z) = scale * |z|^4`.
    QuarticNorm { scale: f64 },
}

impl Nonlinearity {
    pub fn value(&self, z: &[f64]) -> f64 {
        match *self {
            Nonlinearity::None => 0.0,
            Nonlinearity::DoubleWell { scale } => {
                scale
                    * z.iter()
                        .map(|x| {
                            let q = x * x - 1.0;
                            0.25 * q * q
                        })
                        .sum::<f64>()
            }
            Nonlinearity::QuarticNorm { scale } => {
                let s = dot(z, z);
                scale * s * s
            }
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; z.len()];
        self.gradient_into(z, &mut g);
        g
    }

    pub fn gradient_into(&self, z: &[f64], out: &mut [f64]) {
        match *self {
            Nonlinearity::None => out.iter_mut().for_each(|x| *x = 0.0),
            Nonlinearity::DoubleWell { scale } => {
                for (o, x) in out.iter_mut().zip(z) {
                    *o = scale * x * (x * x - 1.0);
                }
            }
            Nonlinearity::QuarticNorm { scale } => {
                let s = 4.0 * scale * dot(z, z);
                for (o, x) in out.iter_mut().zip(z) {
                    *o = s * x;
                }
            }
        }
    }

    pub fn hessian_apply(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        match *self {
            Nonlinearity::None => vec![0.0; z.len()],
            Nonlinearity::DoubleWell { scale } => z
                .iter()
                .zip(v)
                .map(|(x, vi)| scale * (3.0 * x * x - 1.0) * vi)
                .collect(),
            Nonlinearity::QuarticNorm { scale } => {
                let s = dot(z, z);
                let zv = dot(z, v);
                z.iter()
                    .zip(v)
                    .map(|(x, vi)| 4.0 * scale * (s * vi + 2.0 * zv * x))
                    .collect()
            }
        }
    }

    /// Dense row-major Hessian.
    pub fn hessian(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        let mut h = vec![0.0; n * n];
        match *self {
            Nonlinearity::None => {}
            Nonlinearity::DoubleWell { scale } => {
                for i in 0..n {
                    h[i * n + i] = scale * (3.0 * z[i] * z[i] - 1.0);
                }
            }
            Nonlinearity::QuarticNorm { scale } => {
                let s = dot(z, z);
                for i in 0..n {
                    for j in 0..n {
                        let d = if i == j { s } else { 0.0 };
                        h[i * n + j] = 4.0 * scale * (d + 2.0 * z[i] * z[j]);
                    }
                }
            }
        }
        h
    }

    pub fn is_diagonal_hessian(&self) -> bool {
        !matches!(self, Nonlinearity::QuarticNorm { .. })
    }

    /// Exponent `q` in the growth bound `|D^2F(z)v| <= C (1 + |z|^q) |v|`.
    /// Carried as metadata.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            Nonlinearity::None => 1.0,
            Nonlinearity::DoubleWell { .. } | Nonlinearity::QuarticNorm { .. } => 2.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nonlinearity::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_norm_closed_form() {
        let f = Nonlinearity::QuarticNorm { scale: 1.0 };
        assert_eq!(f.value(&[1.0, 1.0]), 4.0);
        assert_eq!(f.gradient(&[1.0, 0.0]), vec![4.0, 0.0]);
    }

    #[test]
    fn double_well_minima_and_barrier() {
        let f = Nonlinearity::DoubleWell { scale: 1.0 };
        assert_eq!(f.value(&[1.0]), 0.0);
        assert_eq!(f.value(&[-1.0]), 0.0);
        assert_eq!(f.value(&[0.0]), 0.25);
        assert_eq!(f.hessian(&[0.0]), vec![-1.0]);
    }
}
