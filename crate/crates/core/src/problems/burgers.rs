use crate::integrator::SemiDiscreteProblem;
use crate::linalg::{CsrMatrix, StiffJacobian};

use super::{Grid2D, PdeBenchmark, ProblemError};

/// Viscous Burgers equation `u_t + u u_x + u u_y = nu Lap(u)` on the unit
/// square, `t in [0, 1]`, with exact solution
/// `u = 1 / (1 + exp((x + y - t) / (2 nu)))`.
///
/// Convection in conservative form `-(1/2)(d_x + d_y)(u^2)` is the nonstiff
/// part, discretized by central differences; diffusion is the stiff part.
#[derive(Debug, Clone)]
pub struct Burgers {
    grid: Grid2D,
    nu: f64,
    t_final: f64,
    laplacian: CsrMatrix,
}

impl Burgers {
    pub const DEFAULT_N: usize = 50;

    pub fn new(n: usize) -> Result<Self, ProblemError> {
        let grid = Grid2D::new(n)?;
        Ok(Self {
            laplacian: grid.laplacian(),
            grid,
            nu: 0.1,
            t_final: 1.0,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn exact_with(nu: f64, t: f64, x: f64, y: f64) -> f64 {
        1.0 / (1.0 + ((x + y - t) / (2.0 * nu)).exp())
    }

    fn value_at(&self, t: f64, y: &[f64], i: usize, j: usize) -> f64 {
        let m = self.grid.side();
        if i == 0 || j == 0 || i > m || j > m {
            Self::exact_with(self.nu, t, self.grid.coord(i), self.grid.coord(j))
        } else {
            y[self.grid.index(i, j)]
        }
    }
}

impl SemiDiscreteProblem for Burgers {
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
        let m = self.grid.side();
        let scale = 0.25 / self.grid.spacing();
        for j in 1..=m {
            for i in 1..=m {
                let sq = |a: f64| a * a;
                let dx = sq(self.value_at(t, y, i + 1, j)) - sq(self.value_at(t, y, i - 1, j));
                let dy = sq(self.value_at(t, y, i, j + 1)) - sq(self.value_at(t, y, i, j - 1));
                out[self.grid.index(i, j)] = -scale * (dx + dy);
            }
        }
    }

    fn stiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.laplacian.mul_vec(y, out);
        for o in out.iter_mut() {
            *o *= self.nu;
        }
        let nu = self.nu;
        self.grid
            .add_boundary_laplacian(nu, out, |x, yy| Self::exact_with(nu, t, x, yy));
    }

    fn stiff_jacobian(&self, _t: f64, _y: &[f64]) -> StiffJacobian {
        StiffJacobian::Sparse(self.laplacian.scaled(self.nu))
    }

    fn stiff_is_linear(&self) -> bool {
        true
    }
}

impl PdeBenchmark for Burgers {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn exact(&self, t: f64, x: f64, y: f64) -> f64 {
        Self::exact_with(self.nu, t, x, y)
    }

    fn stiff_spectral_bound(&self) -> f64 {
        8.0 * self.nu / (self.grid.spacing() * self.grid.spacing())
    }
}
