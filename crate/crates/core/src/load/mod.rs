//! Loads of bounded variation, piecewise affine curves and their Stieltjes pairings.

pub mod bv;
pub mod curve;
pub mod kurzweil;

pub use bv::{BvLoad, Jump, JumpValue, Segment, Side};
pub use curve::PiecewiseLinearCurve;
