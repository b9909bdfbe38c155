use crate::methods::ImexRkMethod;

use super::glm_step::axpy;
use super::{IntegrationError, SemiDiscreteProblem, StageSolveConfig, StageSolver};

/// Additive Runge-Kutta stepper with reusable buffers and factorizations.
pub struct ArkStepper<'a, P: SemiDiscreteProblem + ?Sized> {
    method: &'a ImexRkMethod,
    problem: &'a P,
    solver: StageSolver,
    stages: Vec<Vec<f64>>,
    f_vals: Vec<Vec<f64>>,
    g_vals: Vec<Vec<f64>>,
}

impl<'a, P: SemiDiscreteProblem + ?Sized> ArkStepper<'a, P> {
    pub fn new(
        method: &'a ImexRkMethod,
        problem: &'a P,
        cfg: StageSolveConfig,
    ) -> Result<Self, IntegrationError> {
        let s = method.stages();
        let d = problem.dim();
        Ok(Self {
            method,
            problem,
            solver: StageSolver::new(cfg)?,
            stages: vec![vec![0.0; d]; s],
            f_vals: vec![vec![0.0; d]; s],
            g_vals: vec![vec![0.0; d]; s],
        })
    }

    pub fn solver(&self) -> &StageSolver {
        &self.solver
    }

    /// `y(t) -> y(t + h)`.
    pub fn step(&mut self, t: f64, h: f64, y: &[f64]) -> Result<Vec<f64>, IntegrationError> {
        let m = self.method;
        let (a, ahat, c) = (m.a_explicit(), m.a_implicit(), m.c());
        let d = y.len();
        self.solver.begin_step();
        let mut rhs = vec![0.0; d];
        for i in 0..m.stages() {
            rhs.copy_from_slice(y);
            for j in 0..i {
                let (aij, ahij) = (h * a[(i, j)], h * ahat[(i, j)]);
                if aij != 0.0 {
                    axpy(&mut rhs, aij, &self.f_vals[j]);
                }
                if ahij != 0.0 {
                    axpy(&mut rhs, ahij, &self.g_vals[j]);
                }
            }
            let ti = t + c[i] * h;
            let predictor = if i == 0 { y } else { &self.stages[i - 1] };
            let yi = self
                .solver
                .solve(self.problem, i, h * ahat[(i, i)], ti, &rhs, predictor)?;
            if !yi.iter().all(|x| x.is_finite()) {
                return Err(IntegrationError::Divergence { stage: i });
            }
            self.stages[i] = yi;
            self.problem.nonstiff(ti, &self.stages[i], &mut self.f_vals[i]);
            self.problem.stiff(ti, &self.stages[i], &mut self.g_vals[i]);
        }
        let mut out = y.to_vec();
        for j in 0..m.stages() {
            axpy(&mut out, h * m.b_explicit()[j], &self.f_vals[j]);
            axpy(&mut out, h * m.b_implicit()[j], &self.g_vals[j]);
        }
        if !out.iter().all(|x| x.is_finite()) {
            return Err(IntegrationError::Divergence { stage: m.stages() });
        }
        Ok(out)
    }
}

/// One additive Runge-Kutta step.
pub fn ark_step<P: SemiDiscreteProblem + ?Sized>(
    m: &ImexRkMethod,
    prob: &P,
    y: &[f64],
    t: f64,
    h: f64,
    cfg: &StageSolveConfig,
) -> Result<Vec<f64>, IntegrationError> {
    ArkStepper::new(m, prob, *cfg)?.step(t, h, y)
}
