//! Arc-length reparameterization of viscous trajectories, the vanishing
//! viscosity sweep and the certificates of the limit curve.

pub mod certify;
pub mod curve;
pub mod reparam;
pub mod sweep;

pub use certify::{
    certify, characterize_ell_hat, CertifyOptions, CurveCertificates, CurveFields, EdiBudget,
    EdiCertificate, GInterval, JumpCharacterization,
};
pub use curve::{resample, uniform_grid, CurveData, Resampled};
pub use reparam::{reparameterize, DEFAULT_SUB_NODES};
pub use sweep::{
    richardson, run_level, sweep, CauchyEntry, Level, MeshRule, SweepOptions, SweepResult,
};
