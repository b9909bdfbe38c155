use nalgebra::DMatrix;

use crate::linalg::StiffJacobian;

/// A split system `y' = f(t, y) + g(t, y)` with nonstiff `f` and stiff `g`.
pub trait SemiDiscreteProblem: Sync {
    fn dim(&self) -> usize;
    /// `[t0, tF]`
    fn time_span(&self) -> (f64, f64);
    fn initial_state(&self) -> Vec<f64>;
    /// `out = f(t, y)`
    fn nonstiff(&self, t: f64, y: &[f64], out: &mut [f64]);
    /// `out = g(t, y)`
    fn stiff(&self, t: f64, y: &[f64], out: &mut [f64]);
    fn stiff_jacobian(&self, t: f64, y: &[f64]) -> StiffJacobian;
    /// `true` when `g` is affine in `y`, so its Jacobian is constant.
    fn stiff_is_linear(&self) -> bool {
        false
    }
}

type RhsFn = Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;
type JacFn = Box<dyn Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync>;

/// Problem assembled from closures; handy for small systems and tests.
pub struct ClosureProblem {
    dim: usize,
    span: (f64, f64),
    y0: Vec<f64>,
    f: RhsFn,
    g: RhsFn,
    jac: JacFn,
    linear: bool,
}

impl ClosureProblem {
    /// Starts from `f = g = 0` with a zero Jacobian.
    pub fn new(y0: Vec<f64>, span: (f64, f64)) -> Self {
        let dim = y0.len();
        Self {
            dim,
            span,
            y0,
            f: Box::new(|_, _, out| out.fill(0.0)),
            g: Box::new(|_, _, out| out.fill(0.0)),
            jac: Box::new(move |_, _| DMatrix::zeros(dim, dim)),
            linear: true,
        }
    }

    pub fn nonstiff(mut self, f: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.f = Box::new(f);
        self
    }

    /// Stiff term with its Jacobian; `linear` marks `g` as affine in `y`.
    pub fn stiff(
        mut self,
        g: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
        jac: impl Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        linear: bool,
    ) -> Self {
        self.g = Box::new(g);
        self.jac = Box::new(jac);
        self.linear = linear;
        self
    }
}

impl SemiDiscreteProblem for ClosureProblem {
    fn dim(&self) -> usize {
        self.dim
    }
    fn time_span(&self) -> (f64, f64) {
        self.span
    }
    fn initial_state(&self) -> Vec<f64> {
        self.y0.clone()
    }
    fn nonstiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.f)(t, y, out)
    }
    fn stiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.g)(t, y, out)
    }
    fn stiff_jacobian(&self, t: f64, y: &[f64]) -> StiffJacobian {
        StiffJacobian::Dense((self.jac)(t, y))
    }
    fn stiff_is_linear(&self) -> bool {
        self.linear
    }
}
