//! Viscous regularization, vanishing-viscosity reparameterization and
//! certification of rate-independent systems `0 ∈ ∂R(ż) + DE(t, z)` driven by
//! loads of bounded variation.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod incremental;
pub mod ledger;
pub mod linalg;
pub mod load;
pub mod model;
pub mod run;
pub mod scenarios;
pub mod viscosity;

pub use error::{Error, Result};
