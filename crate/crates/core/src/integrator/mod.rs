//! Fixed-step time integration: IMEX-GLM steps, implicit stage solves, the
//! starting procedure for the external vector, and additive Runge-Kutta
//! stepping for comparison methods.

mod ark;
mod drive;
mod glm_step;
mod problem;
mod stage;
mod starting;

pub use ark::{ark_step, ArkStepper};
pub use drive::{integrate, integrate_ark, integrate_observed, ArkRun, GlmRun};
pub use glm_step::{glm_step, GlmStepper};
pub use problem::{ClosureProblem, SemiDiscreteProblem};
pub use stage::{solve_stage, StageSolver};
pub use starting::{
    derivative_weights, initialize_external, rescaling_matrix, StartingConfig, StartingScheme,
};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("stage {stage}: Newton iteration failed, residual {residual:e}")]
    StageSolve { stage: usize, residual: f64 },
    #[error("stage {stage}: non-finite stage value")]
    Divergence { stage: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("external state has {found} blocks, method needs {expected}")]
    BlockCount { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<IntegrationError>,
    },
}

impl IntegrationError {
    pub(crate) fn at_step(self, step: usize) -> Self {
        IntegrationError::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

/// When the stiff Jacobian (and the factorization of `I - h a_ii J`) is
/// recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianPolicy {
    /// Every implicit stage.
    PerStage,
    /// Once per step, at the first implicit stage.
    PerStep,
    /// Factorizations kept for the whole run when `g` is linear; per stage
    /// otherwise.
    #[default]
    FrozenForLinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSolveConfig {
    /// Newton stops once `|residual| <= tol * max(1, |rhs|)` (max norm).
    pub tol: f64,
    pub max_iter: usize,
    pub jacobian: JacobianPolicy,
}

impl Default for StageSolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 25,
            jacobian: JacobianPolicy::default(),
        }
    }
}

impl StageSolveConfig {
    pub(crate) fn check(&self) -> Result<(), IntegrationError> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(IntegrationError::Config(format!(
                "stage solve needs tol > 0 and max_iter >= 1 (got {}, {})",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

/// The external vector `y^[n]` carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalState {
    pub t: f64,
    pub h: f64,
    /// `r` blocks of length `d`.
    pub blocks: Vec<Vec<f64>>,
    /// Solution approximation at `t`.
    pub solution: Vec<f64>,
}

impl ExternalState {
    pub fn externals(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.solution.len()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().flatten().all(|x| x.is_finite())
    }
}

pub(crate) fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
