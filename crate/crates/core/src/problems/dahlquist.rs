use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::integrator::SemiDiscreteProblem;
use crate::linalg::StiffJacobian;

/// Split test equation `y' = xi y + xi_hat y` with `f = xi y`, `g = xi_hat y`.
///
/// With real parameters and a real initial value the state is a scalar.
/// Otherwise the complex state is stored as `[Re y, Im y]` and each
/// coefficient acts as a 2x2 rotation-scaling block.
#[derive(Debug, Clone, PartialEq)]
pub struct DahlquistSplit {
    xi: Complex64,
    xi_hat: Complex64,
    y0: Complex64,
    t_final: f64,
    complex: bool,
}

impl DahlquistSplit {
    pub fn new(xi: Complex64, xi_hat: Complex64, y0: Complex64, t_final: f64) -> Self {
        let complex = xi.im != 0.0 || xi_hat.im != 0.0 || y0.im != 0.0;
        Self {
            xi,
            xi_hat,
            y0,
            t_final,
            complex,
        }
    }

    pub fn real(xi: f64, xi_hat: f64, y0: f64, t_final: f64) -> Self {
        Self::new(xi.into(), xi_hat.into(), y0.into(), t_final)
    }

    /// Forces the two-component representation even for real data.
    pub fn as_complex(mut self) -> Self {
        self.complex = true;
        self
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    pub fn xi_hat(&self) -> Complex64 {
        self.xi_hat
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    pub fn exact(&self, t: f64) -> Complex64 {
        self.y0 * ((self.xi + self.xi_hat) * t).exp()
    }

    /// Exact solution in the state representation.
    pub fn exact_state(&self, t: f64) -> Vec<f64> {
        self.to_state(self.exact(t))
    }

    pub fn to_state(&self, z: Complex64) -> Vec<f64> {
        if self.complex {
            vec![z.re, z.im]
        } else {
            vec![z.re]
        }
    }

    pub fn from_state(&self, y: &[f64]) -> Complex64 {
        if self.complex {
            Complex64::new(y[0], y[1])
        } else {
            Complex64::new(y[0], 0.0)
        }
    }

    fn apply(&self, k: Complex64, y: &[f64], out: &mut [f64]) {
        let z = k * self.from_state(y);
        out[0] = z.re;
        if self.complex {
            out[1] = z.im;
        }
    }
}

impl SemiDiscreteProblem for DahlquistSplit {
    fn dim(&self) -> usize {
        if self.complex {
            2
        } else {
            1
        }
    }

    fn time_span(&self) -> (f64, f64) {
        (0.0, self.t_final)
    }

    fn initial_state(&self) -> Vec<f64> {
        self.to_state(self.y0)
    }

    fn nonstiff(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        self.apply(self.xi, y, out);
    }

    fn stiff(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        self.apply(self.xi_hat, y, out);
    }

    fn stiff_jacobian(&self, _t: f64, _y: &[f64]) -> StiffJacobian {
        let k = self.xi_hat;
        let jac = if self.complex {
            DMatrix::from_row_slice(2, 2, &[k.re, -k.im, k.im, k.re])
        } else {
            DMatrix::from_element(1, 1, k.re)
        };
        StiffJacobian::Dense(jac)
    }

    fn stiff_is_linear(&self) -> bool {
        true
    }
}
