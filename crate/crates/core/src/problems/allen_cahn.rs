use std::f64::consts::PI;

use crate::integrator::SemiDiscreteProblem;
use crate::linalg::{CsrMatrix, StiffJacobian};

use super::{Grid2D, PdeBenchmark, ProblemError};

/// `u_t = alpha Lap(u) + beta (u - u^3) + s(t, x, y)` on the unit square,
/// `t in [0, 0.5]`, with the source chosen so that
/// `u = 2 + sin(2 pi (x - t)) cos(3 pi (y - t))`.
///
/// Diffusion (with its Dirichlet boundary data) is the stiff part; reaction
/// and source are the nonstiff part.
#[derive(Debug, Clone)]
pub struct AllenCahn {
    grid: Grid2D,
    alpha: f64,
    beta: f64,
    t_final: f64,
    laplacian: CsrMatrix,
    coords: Vec<(f64, f64)>,
}

impl AllenCahn {
    pub const DEFAULT_N: usize = 40;

    pub fn new(n: usize) -> Result<Self, ProblemError> {
        let grid = Grid2D::new(n)?;
        let coords = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.node(k);
                (grid.coord(i), grid.coord(j))
            })
            .collect();
        Ok(Self {
            laplacian: grid.laplacian(),
            grid,
            alpha: 0.01,
            beta: 3.0,
            t_final: 0.5,
            coords,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn exact_u(t: f64, x: f64, y: f64) -> f64 {
        2.0 + (2.0 * PI * (x - t)).sin() * (3.0 * PI * (y - t)).cos()
    }

    /// `u_t - alpha Lap(u) - beta (u - u^3)` evaluated on the exact solution.
    pub fn source(&self, t: f64, x: f64, y: f64) -> f64 {
        let (sx, cx) = (2.0 * PI * (x - t)).sin_cos();
        let (sy, cy) = (3.0 * PI * (y - t)).sin_cos();
        let u = 2.0 + sx * cy;
        let u_t = -2.0 * PI * cx * cy + 3.0 * PI * sx * sy;
        let lap = -13.0 * PI * PI * sx * cy;
        u_t - self.alpha * lap - self.beta * (u - u * u * u)
    }
}

impl SemiDiscreteProblem for AllenCahn {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn time_span(&self) -> (f64, f64) {
        (0.0, self.t_final)
    }

    fn initial_state(&self) -> Vec<f64> {
        self.exact_field(0.0)
    }

    fn nonstiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        for ((o, &u), &(x, yy)) in out.iter_mut().zip(y).zip(&self.coords) {
            *o = self.beta * (u - u * u * u) + self.source(t, x, yy);
        }
    }

    fn stiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.laplacian.mul_vec(y, out);
        for o in out.iter_mut() {
            *o *= self.alpha;
        }
        self.grid
            .add_boundary_laplacian(self.alpha, out, |x, yy| Self::exact_u(t, x, yy));
    }

    fn stiff_jacobian(&self, _t: f64, _y: &[f64]) -> StiffJacobian {
        StiffJacobian::Sparse(self.laplacian.scaled(self.alpha))
    }

    fn stiff_is_linear(&self) -> bool {
        true
    }
}

impl PdeBenchmark for AllenCahn {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn exact(&self, t: f64, x: f64, y: f64) -> f64 {
        Self::exact_u(t, x, y)
    }

    fn stiff_spectral_bound(&self) -> f64 {
        8.0 * self.alpha / (self.grid.spacing() * self.grid.spacing())
    }
}
