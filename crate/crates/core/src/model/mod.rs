//! The triple (energy, dissipation, viscosity metric) in finite dimensions.

pub mod dissipation;
pub mod energy;
pub mod nonlinearity;
pub mod operator;
pub mod system;

pub use dissipation::{Dissipation, GaugeKind, Projection};
pub use energy::{Calibration, Embedding, SemilinearEnergy};
pub use nonlinearity::Nonlinearity;
pub use operator::SpdOperator;
pub use system::System;
