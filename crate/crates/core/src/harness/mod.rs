//! Study orchestration behind the command-line tool: convergence and
//! work-precision studies, stability-region exports and the CLI itself.

mod cli;
mod output;
mod stability_out;
mod study;
mod tables;

pub use cli::{cli_main, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_VALIDATION};
pub use output::{fmt_f64, write_convergence_csv, write_convergence_json, write_workprecision_csv, write_workprecision_json};
pub use stability_out::{emit_stability, StabilityFiles, CONSTRAINED_ALPHAS};
pub use study::{
    Benchmark, Integrator, MethodSpec, ProblemSpec, Reference, ReferenceCache, ReferenceConfig, RunOutput,
    StudySpec,
};
pub use tables::{
    least_squares_slope, pairwise_orders, run_convergence, run_convergence_with, run_workprecision,
    ConvergenceRow, ConvergenceTable, WorkPrecisionRow, WorkPrecisionTable,
};

use thiserror::Error;

use crate::glm::GlmError;
use crate::integrator::IntegrationError;
use crate::problems::ProblemError;
use crate::stability::StabilityError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid study: {0}")]
    Spec(String),
    #[error(transparent)]
    Method(#[from] GlmError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
