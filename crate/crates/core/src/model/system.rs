use crate::error::{Error, Result};
use crate::linalg::sub;
use crate::load::BvLoad;
use crate::model::dissipation::Dissipation;
use crate::model::energy::SemilinearEnergy;
use crate::model::operator::SpdOperator;

/// Energy, dissipation gauge and viscosity metric of one problem.
#[derive(Debug, Clone)]
pub struct System {
    pub energy: SemilinearEnergy,
    pub dissipation: Dissipation,
    pub metric: SpdOperator,
}

impl System {
    pub fn new(
        energy: SemilinearEnergy,
        dissipation: Dissipation,
        metric: SpdOperator,
    ) -> Result<Self> {
        let n = energy.dim();
        for got in [dissipation.dim(), metric.dim()] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got });
            }
        }
        Ok(Self {
            energy,
            dissipation,
            metric,
        })
    }

    pub fn dim(&self) -> usize {
        self.energy.dim()
    }

    pub fn load(&self) -> &BvLoad {
        self.energy.load()
    }

    pub fn with_load(&self, load: BvLoad) -> Result<Self> {
        Self::new(
            self.energy.with_load(load)?,
            self.dissipation.clone(),
            self.metric.clone(),
        )
    }

    /// `dist_V(l - DI(z), ∂R(0))`
    pub fn stress_distance(&self, load_value: &[f64], z: &[f64]) -> Result<f64> {
        let w = sub(load_value, &self.energy.grad_internal(z));
        self.dissipation.distance(&self.metric, &w)
    }

    /// `τ R_ε(Δ/τ) = R(Δ) + ε/(2τ) |Δ|_V^2`
    pub fn step_dissipation(&self, eps: f64, tau: f64, delta: &[f64]) -> f64 {
        self.dissipation.value(delta) + 0.5 * eps / tau * self.metric.quad(delta)
    }
}
