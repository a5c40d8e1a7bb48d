//! Fixed-point engine and the forced Navier-Stokes solver built on it.

pub mod blowup;
pub mod config;
pub mod fixed_point;
pub mod nsf;
pub mod operators;

pub use blowup::{blowup_sweep, detect_blowup, BlowupReport, GrowthPoint, HorizonSolve};
pub use config::{default_r0, ContractionNorm, SolverConfig};
pub use fixed_point::{
    estimate_operator_constants, solve_fixed_point, ConvergenceReport, OperatorConstants,
    SampleSpec, SmallDataCheck, SolveStatus,
};
pub use nsf::{
    compute_uf, drift_constants, mild_residual, ns_constants, solve_nsf, solve_nsf_direct,
    solve_perturbation, ForcedStage, NsfReport, NsfSolution, TrajectoryNorms, LAMBDA_REFUSAL,
};
pub use operators::{BilinearOperator, DriftOperator, LinearOperator, NsBilinear, ZeroOperator};
