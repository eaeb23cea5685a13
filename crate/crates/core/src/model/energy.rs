use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, dot, sub};
use crate::load::bv::{BvLoad, Side};
use crate::model::dissipation::Dissipation;
use crate::model::nonlinearity::Nonlinearity;
use crate::model::operator::SpdOperator;

/// Safety factor applied to every probed (not proven) constant.
pub const CALIBRATION_INFLATION: f64 = 1.1;

/// Random probe points used on top of the deterministic ones.
const RANDOM_PROBES: usize = 64;
const PROBE_SEED: u64 = 0x5eed_1a4b_da00_0001;

/// `E(t, z) = 1/2 <Az, z> + F(z) - <l(t), z>`.
#[derive(Debug, Clone)]
pub struct SemilinearEnergy {
    a: SpdOperator,
    f: Nonlinearity,
    load: BvLoad,
}

/// Embedding constants between the elastic (`Z`, the `A`-norm) and viscous
/// (`V`) metrics. `alpha = 1` because `Z` carries the `A`-norm itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Embedding {
    pub alpha: f64,
    /// `|v|_V <= c_z |v|_Z`
    pub c_z: f64,
    /// `|v|_Z <= c_zv |v|_V`
    pub c_zv: f64,
}

/// Probed constants of the nonconvex part on a `Z`-ball of radius `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub rho: f64,
    /// Semiconvexity defect: `<DE(z1) - DE(z2), z1 - z2> >= alpha/2 |dz|_Z^2 - lambda |dz|_V^2`.
    pub lambda: f64,
    /// Largest `|D^2F|` measured in the `V`-metric over the probes.
    pub hessian_bound: f64,
    /// Upper-bound estimate of the interpolation constant for `kappa = alpha / 2`.
    pub interpolation: f64,
    pub probes: usize,
}

impl SemilinearEnergy {
    pub fn new(a: SpdOperator, f: Nonlinearity, load: BvLoad) -> Result<Self> {
        if load.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: load.dim(),
            });
        }
        Ok(Self { a, f, load })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn operator(&self) -> &SpdOperator {
        &self.a
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.f
    }

    pub fn load(&self) -> &BvLoad {
        &self.load
    }

    pub fn with_load(&self, load: BvLoad) -> Result<Self> {
        Self::new(self.a.clone(), self.f, load)
    }

    /// `I(z) = 1/2 <Az, z> + F(z)`
    pub fn internal(&self, z: &[f64]) -> f64 {
        0.5 * self.a.quad(z) + self.f.value(z)
    }

    /// `DI(z) = Az + DF(z)`
    pub fn grad_internal(&self, z: &[f64]) -> Vec<f64> {
        let mut g = self.f.gradient(z);
        let az = self.a.apply(z);
        for (gi, ai) in g.iter_mut().zip(az) {
            *gi += ai;
        }
        g
    }

    /// Energy with an explicit load value in place of `l(t)`.
    pub fn energy_with(&self, load_value: &[f64], z: &[f64]) -> f64 {
        self.internal(z) - dot(load_value, z)
    }

    pub fn grad_with(&self, load_value: &[f64], z: &[f64]) -> Vec<f64> {
        sub(&self.grad_internal(z), load_value)
    }

    fn load_at(&self, t: f64) -> Result<Vec<f64>> {
        self.load.eval(t, Side::At)
    }

    pub fn energy(&self, t: f64, z: &[f64]) -> Result<f64> {
        self.check_state(z)?;
        let e = self.energy_with(&self.load_at(t)?, z);
        if !e.is_finite() {
            return Err(Error::NumericOverflow("energy"));
        }
        Ok(e)
    }

    pub fn grad(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        self.check_state(z)?;
        let g = self.grad_with(&self.load_at(t)?, z);
        if !all_finite(&g) {
            return Err(Error::NumericOverflow("energy gradient"));
        }
        Ok(g)
    }

    fn check_state(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        if !all_finite(z) {
            return Err(Error::NumericOverflow("state"));
        }
        Ok(())
    }

    pub fn embedding(&self, metric: &SpdOperator) -> Embedding {
        let (_, v_over_a) = self.a.relative_spectrum(metric.entries());
        let (_, a_over_v) = metric.relative_spectrum(self.a.entries());
        Embedding {
            alpha: 1.0,
            c_z: v_over_a.sqrt(),
            c_zv: a_over_v.sqrt(),
        }
    }

    /// Coercivity offset `c_0 = c_z^2 / alpha (1 + |l|_inf^2)`.
    pub fn coercivity_offset(&self, metric: &SpdOperator) -> f64 {
        let emb = self.embedding(metric);
        let sup = self.load.sup_norm(metric);
        emb.c_z * emb.c_z / emb.alpha * (1.0 + sup * sup)
    }

    /// Deterministic probe set in the `A`-ball of radius `rho`: origin,
    /// coordinate-extreme points, and seeded random points.
    pub fn probe_points(&self, rho: f64) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut pts = vec![vec![0.0; n]];
        for i in 0..n {
            // argmax of z_i over the ball is rho A^{-1} e_i / sqrt((A^{-1})_ii).
            let scale = rho / self.a.inverse_entry(i, i).sqrt();
            let col: Vec<f64> = (0..n).map(|j| self.a.inverse_entry(j, i) * scale).collect();
            pts.push(col.iter().map(|x| -x).collect());
            pts.push(col);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        for _ in 0..RANDOM_PROBES {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = self.a.norm(&v);
            if norm == 0.0 {
                continue;
            }
            let radius = rho * rng.gen::<f64>().powf(1.0 / n as f64);
            v.iter_mut().for_each(|x| *x *= radius / norm);
            pts.push(v);
        }
        pts
    }

    /// Probes `D^2F` over the `rho`-ball and returns the semiconvexity defect
    /// and the interpolation constant, both inflated by 10%.
    pub fn calibrate(
        &self,
        metric: &SpdOperator,
        dissipation: &Dissipation,
        rho: f64,
    ) -> Calibration {
        let pts = self.probe_points(rho.max(0.0));
        if self.f.is_zero() {
            return Calibration {
                rho,
                lambda: 0.0,
                hessian_bound: 0.0,
                interpolation: 0.0,
                probes: pts.len(),
            };
        }
        let mut min_eig = f64::INFINITY;
        let mut radius = 0.0_f64;
        for p in &pts {
            let (lo, hi) = metric.relative_spectrum(&self.f.hessian(p));
            min_eig = min_eig.min(lo);
            radius = radius.max(lo.abs()).max(hi.abs());
        }
        Calibration {
            rho,
            lambda: CALIBRATION_INFLATION * (-min_eig).max(0.0),
            hessian_bound: radius,
            interpolation: CALIBRATION_INFLATION * radius * dissipation.metric_per_gauge(metric),
            probes: pts.len(),
        }
    }

    /// Both sides of the semiconvexity inequality for the calibrated `lambda`.
    pub fn lambda_convexity_probe(
        &self,
        metric: &SpdOperator,
        calibration: &Calibration,
        t: f64,
        z1: &[f64],
        z2: &[f64],
    ) -> Result<(f64, f64)> {
        let d = sub(z1, z2);
        let g = sub(&self.grad(t, z1)?, &self.grad(t, z2)?);
        let emb = self.embedding(metric);
        let lhs = dot(&g, &d);
        let rhs = 0.5 * emb.alpha * self.a.quad(&d) - calibration.lambda * metric.quad(&d);
        Ok((lhs, rhs))
    }

    /// Both sides of the interpolation estimate with `kappa = alpha / 2`.
    pub fn interpolation_probe(
        &self,
        metric: &SpdOperator,
        dissipation: &Dissipation,
        calibration: &Calibration,
        z1: &[f64],
        z2: &[f64],
    ) -> (f64, f64) {
        let d = sub(z1, z2);
        let g = sub(&self.f.gradient(z1), &self.f.gradient(z2));
        let lhs = dot(&g, &d).abs();
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let r = dissipation.value(&d).min(dissipation.value(&neg));
        let rhs = 0.25 * self.a.quad(&d) + calibration.interpolation * r * metric.norm(&d);
        (lhs, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, f: Nonlinearity, load: BvLoad) -> SemilinearEnergy {
        SemilinearEnergy::new(SpdOperator::scalar(1, a).unwrap(), f, load).unwrap()
    }

    #[test]
    fn energy_examples() {
        let zero = BvLoad::constant(1.0, vec![0.0]).unwrap();
        assert_eq!(
            scalar(1.0, Nonlinearity::None, zero)
                .energy(0.3, &[2.0])
                .unwrap(),
            2.0
        );
        let three = BvLoad::constant(1.0, vec![3.0]).unwrap();
        assert_eq!(
            scalar(1.0, Nonlinearity::None, three)
                .energy(0.3, &[2.0])
                .unwrap(),
            -4.0
        );
        let e = SemilinearEnergy::new(
            SpdOperator::identity(2),
            Nonlinearity::QuarticNorm { scale: 1.0 },
            BvLoad::constant(1.0, vec![0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(e.energy(0.0, &[1.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn gradient_examples() {
        let ramp = BvLoad::ramp(1.0, vec![0.0], vec![1.0]).unwrap();
        assert_eq!(
            scalar(2.0, Nonlinearity::None, ramp)
                .grad(1.0, &[3.0])
                .unwrap(),
            vec![5.0]
        );
        let e = SemilinearEnergy::new(
            SpdOperator::identity(2),
            Nonlinearity::QuarticNorm { scale: 1.0 },
            BvLoad::constant(1.0, vec![0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(e.grad(0.0, &[1.0, 0.0]).unwrap(), vec![5.0, 0.0]);
    }

    #[test]
    fn overflow_is_reported() {
        let zero = BvLoad::constant(1.0, vec![0.0]).unwrap();
        let e = scalar(1.0, Nonlinearity::QuarticNorm { scale: 1.0 }, zero);
        assert_eq!(
            e.energy(0.0, &[1e100]),
            Err(Error::NumericOverflow("energy"))
        );
        assert!(e.energy(0.0, &[f64::NAN]).is_err());
    }

    #[test]
    fn embedding_of_scalar_pair() {
        let zero = BvLoad::constant(1.0, vec![0.0]).unwrap();
        let e = scalar(4.0, Nonlinearity::None, zero);
        let emb = e.embedding(&SpdOperator::identity(1));
        assert!((emb.c_z - 0.5).abs() < 1e-15);
        assert!((emb.c_zv - 2.0).abs() < 1e-15);
    }

    #[test]
    fn convex_case_has_no_defect() {
        let zero = BvLoad::constant(1.0, vec![0.0]).unwrap();
        let e = scalar(1.0, Nonlinearity::None, zero);
        let r = Dissipation::uniform(1, 1.0).unwrap();
        let cal = e.calibrate(&SpdOperator::identity(1), &r, 3.0);
        assert_eq!(cal.lambda, 0.0);
        let (lhs, rhs) = e
            .lambda_convexity_probe(&SpdOperator::identity(1), &cal, 0.0, &[1.0], &[1.0])
            .unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn double_well_defect_matches_grid_search() {
        // F'' = 3z^2 - 1 on [-2, 2] (A = 1 so the A-ball is the interval):
        // the minimum -1 sits at z = 0, the maximum 11 at the ends.
        let zero = BvLoad::constant(1.0, vec![0.0]).unwrap();
        let e = scalar(1.0, Nonlinearity::DoubleWell { scale: 1.0 }, zero);
        let r = Dissipation::uniform(1, 1.0).unwrap();
        let cal = e.calibrate(&SpdOperator::identity(1), &r, 2.0);
        let grid_min = (0..=4000)
            .map(|k| {
                let z = -2.0 + 4.0 * k as f64 / 4000.0;
                3.0 * z * z - 1.0
            })
            .fold(f64::INFINITY, f64::min);
        assert!((cal.lambda - 1.1 * -grid_min).abs() < 1e-12);
        assert!((cal.hessian_bound - 11.0).abs() < 1e-12);
    }
}
