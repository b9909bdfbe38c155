//! Benchmark problems in split form: the scalar Dahlquist test equation and
//! the 2D Allen-Cahn and viscous Burgers equations discretized by second-order
//! finite differences with time-dependent Dirichlet data.

mod allen_cahn;
mod burgers;
mod dahlquist;
mod error;
mod grid;
mod reference;

pub use allen_cahn::AllenCahn;
pub use burgers::Burgers;
pub use dahlquist::DahlquistSplit;
pub use error::{error_field, l2_error, write_node_csv, NodeValue};
pub use grid::Grid2D;
pub use reference::{reference_solution, rk4_step, Rk4Work};

use thiserror::Error;

use crate::integrator::SemiDiscreteProblem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },
    #[error("grid parameter n = {0} is below the minimum of 4")]
    GridTooSmall(usize),
    #[error("reference RK4 run became unstable at step {step}; increase the reference step count (currently {steps})")]
    ReferenceFailure { step: usize, steps: usize },
}

/// A semi-discretized PDE on the unit square with a known exact solution.
pub trait PdeBenchmark: SemiDiscreteProblem {
    fn grid(&self) -> &Grid2D;
    /// Exact PDE solution `u(t, x, y)`.
    fn exact(&self, t: f64, x: f64, y: f64) -> f64;
    /// Bound on the spectral radius of the stiff operator.
    fn stiff_spectral_bound(&self) -> f64;

    /// Exact solution sampled on the interior nodes.
    fn exact_field(&self, t: f64) -> Vec<f64> {
        self.grid().sample(|x, y| self.exact(t, x, y))
    }
}
