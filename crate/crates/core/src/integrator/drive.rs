use std::time::Instant;

use crate::glm::ImexGlmMethod;
use crate::methods::ImexRkMethod;

use super::{
    initialize_external, ArkStepper, ExternalState, GlmStepper, IntegrationError,
    SemiDiscreteProblem, StageSolveConfig, StartingConfig,
};

/// Result of a fixed-step IMEX-GLM run.
#[derive(Debug, Clone)]
pub struct GlmRun {
    /// Approximation of `y(tF)`.
    pub solution: Vec<f64>,
    pub steps: usize,
    pub h: f64,
    /// Wall-clock time spent in the starting procedure.
    pub start_seconds: f64,
    /// Wall-clock time spent stepping.
    pub step_seconds: f64,
    pub factorizations: usize,
}

/// Integrates over the problem's time span with `steps` equal steps.
pub fn integrate<P: SemiDiscreteProblem + ?Sized>(
    m: &ImexGlmMethod,
    prob: &P,
    steps: usize,
    start: &StartingConfig,
    cfg: &StageSolveConfig,
) -> Result<GlmRun, IntegrationError> {
    integrate_observed(m, prob, steps, start, cfg, |_, _| {})
}

/// Like [`integrate`], calling `observer(n, state)` after every step
/// (and with `n = 0` for the initial external vector).
pub fn integrate_observed<P, F>(
    m: &ImexGlmMethod,
    prob: &P,
    steps: usize,
    start: &StartingConfig,
    cfg: &StageSolveConfig,
    mut observer: F,
) -> Result<GlmRun, IntegrationError>
where
    P: SemiDiscreteProblem + ?Sized,
    F: FnMut(usize, &ExternalState),
{
    if steps == 0 {
        return Err(IntegrationError::Config("step count must be >= 1".into()));
    }
    let (t0, tf) = prob.time_span();
    let h = (tf - t0) / steps as f64;

    let clock = Instant::now();
    let mut state = initialize_external(m, prob, h, start, cfg)?;
    let start_seconds = clock.elapsed().as_secs_f64();
    observer(0, &state);

    let clock = Instant::now();
    let mut stepper = GlmStepper::new(m, prob, *cfg)?;
    for n in 0..steps {
        state = stepper.step(&state).map_err(|e| e.at_step(n + 1))?;
        // keep the time grid exact rather than accumulating h
        state.t = t0 + (n + 1) as f64 * h;
        observer(n + 1, &state);
    }
    let step_seconds = clock.elapsed().as_secs_f64();
    Ok(GlmRun {
        solution: state.solution,
        steps,
        h,
        start_seconds,
        step_seconds,
        factorizations: stepper.solver().factorizations(),
    })
}

#[derive(Debug, Clone)]
pub struct ArkRun {
    pub solution: Vec<f64>,
    pub steps: usize,
    pub h: f64,
    pub step_seconds: f64,
}

/// Fixed-step additive Runge-Kutta run over the problem's time span.
pub fn integrate_ark<P: SemiDiscreteProblem + ?Sized>(
    m: &ImexRkMethod,
    prob: &P,
    steps: usize,
    cfg: &StageSolveConfig,
) -> Result<ArkRun, IntegrationError> {
    if steps == 0 {
        return Err(IntegrationError::Config("step count must be >= 1".into()));
    }
    let (t0, tf) = prob.time_span();
    let h = (tf - t0) / steps as f64;
    let clock = Instant::now();
    let mut stepper = ArkStepper::new(m, prob, *cfg)?;
    let mut y = prob.initial_state();
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        y = stepper.step(t, h, &y).map_err(|e| e.at_step(n + 1))?;
    }
    Ok(ArkRun {
        solution: y,
        steps,
        h,
        step_seconds: clock.elapsed().as_secs_f64(),
    })
}
