use std::sync::Arc;

use crate::linalg::{Factorization, StiffJacobian};

use super::{max_norm, IntegrationError, JacobianPolicy, SemiDiscreteProblem, StageSolveConfig};

/// Solves implicit stage equations `Y - gamma g(t, Y) = rhs` and owns the
/// factorizations of `I - gamma J` that can be reused between stages.
#[derive(Debug)]
pub struct StageSolver {
    cfg: StageSolveConfig,
    cache: Vec<(u64, Arc<Factorization>)>,
    step_jacobian: Option<StiffJacobian>,
    factorizations: usize,
}

impl StageSolver {
    pub fn new(cfg: StageSolveConfig) -> Result<Self, IntegrationError> {
        cfg.check()?;
        Ok(Self {
            cfg,
            cache: Vec::new(),
            step_jacobian: None,
            factorizations: 0,
        })
    }

    pub fn config(&self) -> &StageSolveConfig {
        &self.cfg
    }

    /// Number of factorizations computed so far.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    /// Drops per-step data; called at the start of each step.
    pub fn begin_step(&mut self) {
        if self.cfg.jacobian == JacobianPolicy::PerStep {
            self.step_jacobian = None;
            self.cache.clear();
        }
    }

    fn reuse_across_stages<P: SemiDiscreteProblem + ?Sized>(&self, prob: &P) -> bool {
        match self.cfg.jacobian {
            JacobianPolicy::PerStage => false,
            JacobianPolicy::PerStep => true,
            JacobianPolicy::FrozenForLinear => prob.stiff_is_linear(),
        }
    }

    fn factor<P: SemiDiscreteProblem + ?Sized>(
        &mut self,
        prob: &P,
        gamma: f64,
        t: f64,
        at: &[f64],
    ) -> Result<Arc<Factorization>, IntegrationError> {
        let key = gamma.to_bits();
        let reuse = self.reuse_across_stages(prob);
        if reuse {
            if let Some((_, f)) = self.cache.iter().find(|(k, _)| *k == key) {
                return Ok(f.clone());
            }
        }
        let jac = if self.cfg.jacobian == JacobianPolicy::PerStep {
            self.step_jacobian
                .get_or_insert_with(|| prob.stiff_jacobian(t, at))
                .clone()
        } else {
            prob.stiff_jacobian(t, at)
        };
        let f = Arc::new(jac.factor_shifted(gamma)?);
        self.factorizations += 1;
        if reuse {
            self.cache.push((key, f.clone()));
        }
        Ok(f)
    }

    /// Returns `Y` with `|Y - gamma g(t, Y) - rhs| <= tol * max(1, |rhs|)`.
    /// `predictor` seeds the Newton iteration and the Jacobian evaluation.
    pub fn solve<P: SemiDiscreteProblem + ?Sized>(
        &mut self,
        prob: &P,
        stage: usize,
        gamma: f64,
        t: f64,
        rhs: &[f64],
        predictor: &[f64],
    ) -> Result<Vec<f64>, IntegrationError> {
        if gamma == 0.0 {
            return Ok(rhs.to_vec());
        }
        if gamma < 0.0 {
            return Err(IntegrationError::Config(format!(
                "negative implicit coefficient h*a_ii = {gamma}"
            )));
        }
        let d = rhs.len();
        if prob.stiff_is_linear() {
            // (I - gamma J) Y = rhs + gamma g(t, 0)
            let f = self.factor(prob, gamma, t, predictor)?;
            let zero = vec![0.0; d];
            let mut y = vec![0.0; d];
            prob.stiff(t, &zero, &mut y);
            for (yi, ri) in y.iter_mut().zip(rhs) {
                *yi = ri + gamma * *yi;
            }
            f.solve_in_place(&mut y)?;
            if !y.iter().all(|x| x.is_finite()) {
                return Err(IntegrationError::Divergence { stage });
            }
            return Ok(y);
        }

        let scale = self.cfg.tol * max_norm(rhs).max(1.0);
        let mut y = predictor.to_vec();
        let mut g = vec![0.0; d];
        let mut res = vec![0.0; d];
        let mut factor: Option<Arc<Factorization>> = None;
        let mut residual = f64::INFINITY;
        for _ in 0..=self.cfg.max_iter {
            prob.stiff(t, &y, &mut g);
            for i in 0..d {
                res[i] = y[i] - gamma * g[i] - rhs[i];
            }
            residual = max_norm(&res);
            if !residual.is_finite() {
                return Err(IntegrationError::Divergence { stage });
            }
            if residual <= scale {
                return Ok(y);
            }
            if factor.is_none() {
                factor = Some(self.factor(prob, gamma, t, &y)?);
            }
            let f = factor.as_ref().unwrap();
            f.solve_in_place(&mut res)?;
            for i in 0..d {
                y[i] -= res[i];
            }
        }
        Err(IntegrationError::StageSolve { stage, residual })
    }
}

/// One-off stage solve for stage `stage` of `m` at time `t + c_i h`.
pub fn solve_stage<P: SemiDiscreteProblem + ?Sized>(
    stage: usize,
    rhs: &[f64],
    m: &crate::glm::ImexGlmMethod,
    prob: &P,
    t: f64,
    h: f64,
    cfg: &StageSolveConfig,
) -> Result<Vec<f64>, IntegrationError> {
    let gamma = h * m.implicit().a()[(stage, stage)];
    let mut solver = StageSolver::new(*cfg)?;
    solver.solve(prob, stage, gamma, t + m.c()[stage] * h, rhs, rhs)
}
