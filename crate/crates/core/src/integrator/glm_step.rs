use crate::glm::ImexGlmMethod;

use super::{ExternalState, IntegrationError, SemiDiscreteProblem, StageSolveConfig, StageSolver};

/// Advances the external vector of an IMEX-GLM one step at a time, keeping
/// stage buffers and factorizations between steps.
pub struct GlmStepper<'a, P: SemiDiscreteProblem + ?Sized> {
    method: &'a ImexGlmMethod,
    problem: &'a P,
    solver: StageSolver,
    stages: Vec<Vec<f64>>,
    f_vals: Vec<Vec<f64>>,
    g_vals: Vec<Vec<f64>>,
}

impl<'a, P: SemiDiscreteProblem + ?Sized> GlmStepper<'a, P> {
    pub fn new(
        method: &'a ImexGlmMethod,
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

    /// Stage values of the most recent step.
    pub fn stages(&self) -> &[Vec<f64>] {
        &self.stages
    }

    pub fn step(&mut self, state: &ExternalState) -> Result<ExternalState, IntegrationError> {
        let m = self.method;
        let s = m.stages();
        let r = m.externals();
        let d = self.problem.dim();
        if state.externals() != r {
            return Err(IntegrationError::BlockCount {
                expected: r,
                found: state.externals(),
            });
        }
        let (a, ahat) = (m.explicit().a(), m.implicit().a());
        let u = m.explicit().u();
        let (t, h) = (state.t, state.h);
        self.solver.begin_step();

        let mut rhs = vec![0.0; d];
        for i in 0..s {
            rhs.fill(0.0);
            for (j, block) in state.blocks.iter().enumerate() {
                let uij = u[(i, j)];
                if uij != 0.0 {
                    axpy(&mut rhs, uij, block);
                }
            }
            for j in 0..i {
                let (aij, ahij) = (h * a[(i, j)], h * ahat[(i, j)]);
                if aij != 0.0 {
                    axpy(&mut rhs, aij, &self.f_vals[j]);
                }
                if ahij != 0.0 {
                    axpy(&mut rhs, ahij, &self.g_vals[j]);
                }
            }
            let ti = t + m.c()[i] * h;
            let gamma = h * ahat[(i, i)];
            let predictor = if i == 0 { &state.blocks[0] } else { &self.stages[i - 1] };
            let y = self
                .solver
                .solve(self.problem, i, gamma, ti, &rhs, predictor)?;
            if !y.iter().all(|x| x.is_finite()) {
                return Err(IntegrationError::Divergence { stage: i });
            }
            self.stages[i] = y;
            self.problem.nonstiff(ti, &self.stages[i], &mut self.f_vals[i]);
            self.problem.stiff(ti, &self.stages[i], &mut self.g_vals[i]);
        }

        let (b, bhat, v) = (m.explicit().b(), m.implicit().b(), m.explicit().v());
        let mut blocks = Vec::with_capacity(r);
        for i in 0..r {
            let mut y = vec![0.0; d];
            for (j, block) in state.blocks.iter().enumerate() {
                let vij = v[(i, j)];
                if vij != 0.0 {
                    axpy(&mut y, vij, block);
                }
            }
            for j in 0..s {
                axpy(&mut y, h * b[(i, j)], &self.f_vals[j]);
                axpy(&mut y, h * bhat[(i, j)], &self.g_vals[j]);
            }
            blocks.push(y);
        }
        let solution = match m.solution_stage() {
            Some(k) => self.stages[k].clone(),
            None => blocks[0].clone(),
        };
        let next = ExternalState {
            t: t + h,
            h,
            blocks,
            solution,
        };
        if !next.is_finite() {
            return Err(IntegrationError::Divergence { stage: s });
        }
        Ok(next)
    }
}

#[inline]
pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// One IMEX-GLM step from `state` (with step size `state.h`).
pub fn glm_step<P: SemiDiscreteProblem + ?Sized>(
    m: &ImexGlmMethod,
    prob: &P,
    state: &ExternalState,
    cfg: &StageSolveConfig,
) -> Result<ExternalState, IntegrationError> {
    GlmStepper::new(m, prob, *cfg)?.step(state)
}
