//! Time-incremental minimization, its trajectories and a priori ledgers.

pub mod edp;
pub mod estimates;
pub mod partition;
pub mod step;
pub mod trajectory;

pub use edp::{check_discrete_edp, EdpCheck};
pub use estimates::{
    check_basic_estimates, check_bv_estimates, estimate_constants, EstimateConstants,
};
pub use partition::Partition;
pub use step::{incremental_step, MultiStart, StepOptions, StepOutcome};
pub use trajectory::{
    solve_trajectory, DiscreteTrajectory, Interpolants, SolveOptions, StepRecord, WarmStart,
};
