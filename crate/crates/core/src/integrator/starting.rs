use std::sync::Arc;

use nalgebra::DMatrix;

use crate::glm::ImexGlmMethod;
use crate::methods::ImexRkMethod;

use super::{ArkStepper, ExternalState, IntegrationError, SemiDiscreteProblem, StageSolveConfig};

/// One-step scheme used for the `r - 1` micro-steps of the starting procedure.
#[derive(Debug, Clone, Default)]
pub enum StartingScheme {
    #[default]
    ImexEuler,
    /// Additive Runge-Kutta pair, e.g. loaded with
    /// [`load_ark_method`](crate::methods::load_ark_method).
    Ark(Arc<ImexRkMethod>),
}

impl StartingScheme {
    fn method(&self) -> ImexRkMethod {
        match self {
            StartingScheme::ImexEuler => ImexRkMethod::imex_euler(),
            StartingScheme::Ark(m) => (**m).clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StartingConfig {
    /// Micro-step `tau = tau_ratio * h`, with `0 < tau_ratio <= 1`.
    pub tau_ratio: f64,
    pub scheme: StartingScheme,
    /// Auxiliary steps taken per micro-step.
    pub substeps: usize,
    /// Number of Aitken-Neville levels: each micro-step is repeated with
    /// `substeps * k` auxiliary steps for `k = 1..=levels` and the results are
    /// extrapolated to zero step size. `1` disables extrapolation.
    pub extrapolation: usize,
}

impl Default for StartingConfig {
    fn default() -> Self {
        Self {
            tau_ratio: 0.5,
            scheme: StartingScheme::default(),
            substeps: 1,
            extrapolation: 4,
        }
    }
}

/// Weights `D` with `tau^k x^(k)(t0) = tau sum_j d_kj x'(t0 + (j-1) tau) + O(tau^(r+1))`,
/// `k = 1..r`, from the moment conditions on the nodes `0, 1, ..., r-1`.
pub fn derivative_weights(r: usize) -> DMatrix<f64> {
    assert!(r >= 1, "derivative_weights needs r >= 1");
    if r > 12 {
        log::warn!("derivative weights for r = {r} are badly conditioned");
    }
    // moments[(l, j)] = j^l / l!
    let mut moments = DMatrix::<f64>::zeros(r, r);
    for j in 0..r {
        let mut term = 1.0;
        for l in 0..r {
            if l > 0 {
                term *= j as f64 / l as f64;
            }
            moments[(l, j)] = term;
        }
    }
    // D * moments^T = I
    moments
        .transpose()
        .try_inverse()
        .expect("Vandermonde moment matrix on distinct nodes is invertible")
}

/// `diag(h/tau, (h/tau)^2, ..., (h/tau)^r)`
pub fn rescaling_matrix(h: f64, tau: f64, r: usize) -> DMatrix<f64> {
    assert!(tau > 0.0, "tau must be positive");
    let ratio = h / tau;
    DMatrix::from_fn(r, r, |i, j| if i == j { ratio.powi(i as i32 + 1) } else { 0.0 })
}

/// Advances `y` over `[t, t + tau]` with `base * k` auxiliary steps for
/// `k = 1..=levels` and returns the Aitken-Neville extrapolation in the
/// auxiliary step size.
fn extrapolated_step<P: SemiDiscreteProblem + ?Sized>(
    stepper: &mut ArkStepper<'_, P>,
    t: f64,
    tau: f64,
    y: &[f64],
    base: usize,
    levels: usize,
) -> Result<Vec<f64>, IntegrationError> {
    // prev[j] = T_{k-1, j+1}
    let mut prev: Vec<Vec<f64>> = Vec::new();
    for k in 1..=levels {
        let n = base * k;
        let sub = tau / n as f64;
        let mut z = y.to_vec();
        for i in 0..n {
            z = stepper.step(t + i as f64 * sub, sub, &z)?;
        }
        let mut row = vec![z];
        for j in 1..k {
            let ratio = k as f64 / (k - j) as f64;
            let next = row[j - 1]
                .iter()
                .zip(&prev[j - 1])
                .map(|(a, b)| a + (a - b) / (ratio - 1.0))
                .collect();
            row.push(next);
        }
        prev = row;
    }
    Ok(prev.pop().expect("at least one level"))
}

/// Builds `y^[0]` from `y0` and `r - 1` auxiliary micro-steps of size `tau`:
///
/// `y_i^[0] = y0 + tau sum_{k,j} (q_ik R_kk d_kj f(y_j) + qhat_ik R_kk d_kj g(y_j))`,
///
/// which reduces to `y0 + q_i1 h f(y0) + qhat_i1 h g(y0) + ...` because the
/// first row of `D` is `e_1`.
pub fn initialize_external<P: SemiDiscreteProblem + ?Sized>(
    m: &ImexGlmMethod,
    prob: &P,
    h: f64,
    start: &StartingConfig,
    cfg: &StageSolveConfig,
) -> Result<ExternalState, IntegrationError> {
    if !(start.tau_ratio > 0.0 && start.tau_ratio <= 1.0) {
        return Err(IntegrationError::Config(format!(
            "tau ratio must lie in (0, 1], got {}",
            start.tau_ratio
        )));
    }
    if start.substeps == 0 || start.extrapolation == 0 {
        return Err(IntegrationError::Config(
            "substeps and extrapolation levels must be >= 1".into(),
        ));
    }
    let tau = start.tau_ratio * h;
    let r = m.externals();
    let d = prob.dim();
    let (t0, _) = prob.time_span();
    let y0 = prob.initial_state();

    let mut points = vec![y0.clone()];
    if r > 1 {
        let aux = start.scheme.method();
        let mut stepper = ArkStepper::new(&aux, prob, *cfg)?;
        let mut y = y0.clone();
        for j in 1..r {
            let t = t0 + (j - 1) as f64 * tau;
            y = extrapolated_step(&mut stepper, t, tau, &y, start.substeps, start.extrapolation)?;
            points.push(y.clone());
        }
    }
    let mut f_start = vec![vec![0.0; d]; r];
    let mut g_start = vec![vec![0.0; d]; r];
    for (j, y) in points.iter().enumerate() {
        let t = t0 + j as f64 * tau;
        prob.nonstiff(t, y, &mut f_start[j]);
        prob.stiff(t, y, &mut g_start[j]);
    }

    let dw = derivative_weights(r);
    let resc = rescaling_matrix(h, tau, r);
    let kmax = r.min(m.order());
    // weights[(i, j)] = tau * sum_k q_ik R_kk d_kj
    let weights = |q: &DMatrix<f64>| {
        DMatrix::from_fn(r, r, |i, j| {
            tau * (1..=kmax)
                .map(|k| q[(i, k)] * resc[(k - 1, k - 1)] * dw[(k - 1, j)])
                .sum::<f64>()
        })
    };
    let wf = weights(m.q());
    let wg = weights(m.qhat());
    let mut blocks = Vec::with_capacity(r);
    for i in 0..r {
        let mut y = y0.clone();
        for j in 0..r {
            super::glm_step::axpy(&mut y, wf[(i, j)], &f_start[j]);
            super::glm_step::axpy(&mut y, wg[(i, j)], &g_start[j]);
        }
        blocks.push(y);
    }
    Ok(ExternalState {
        t: t0,
        h,
        blocks,
        solution: y0,
    })
}
