//! Linear stability of IMEX-GLMs on the split test equation: stability
//! matrices, L-stability and IRKS checks, constrained stability regions and
//! their areas, and optimization of the explicit component.

mod checks;
mod matrix;
mod optimize;
mod region;

pub use checks::{check_irks, check_l_stability, left_half_plane_samples, IrksReport, IrksSample, LStabilityReport};
pub use matrix::{glm_stability_matrix, imex_stability_matrix};
pub use optimize::{optimize_explicit_component, OptimizeConfig, OptimizeResult};
pub use region::{
    boundary_intersection, constrained_region_area, equally_spaced_angles, max_rho_over_stiff_grid,
    region_boundary_points, AreaReport, GridMaximum, Intersection, RegionBoundary, RegionKind, StabilityQuery,
};

pub use crate::linalg::spectral_radius;

use thiserror::Error;

use crate::glm::GlmError;
use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("I - w A - what Ahat is singular")]
    Singular,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Method(#[from] GlmError),
    #[error("invalid stability query: {0}")]
    Query(String),
    #[error("optimization failed: best area is zero after {0} evaluations")]
    OptimizationFailed(usize),
}
