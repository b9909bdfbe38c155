use crate::integrator::SemiDiscreteProblem;

use super::ProblemError;

/// One classical RK4 step on `f + g`.
pub fn rk4_step<P: SemiDiscreteProblem + ?Sized>(prob: &P, t: f64, h: f64, y: &mut [f64], work: &mut Rk4Work) {
    let n = y.len();
    work.resize(n);
    let Rk4Work { k, tmp, scratch } = work;
    let rhs = |t: f64, y: &[f64], out: &mut [f64], scratch: &mut [f64]| {
        prob.nonstiff(t, y, out);
        prob.stiff(t, y, scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += s;
        }
    };
    let offsets = [0.0, 0.5, 0.5, 1.0];
    for stage in 0..4 {
        if stage == 0 {
            tmp.copy_from_slice(y);
        } else {
            let prev = &k[stage - 1];
            for i in 0..n {
                tmp[i] = y[i] + offsets[stage] * h * prev[i];
            }
        }
        rhs(t + offsets[stage] * h, tmp, &mut k[stage], scratch);
    }
    for i in 0..n {
        y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// Scratch storage for [`rk4_step`].
#[derive(Debug, Default, Clone)]
pub struct Rk4Work {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    scratch: Vec<f64>,
}

impl Rk4Work {
    fn resize(&mut self, n: usize) {
        for v in self.k.iter_mut().chain([&mut self.tmp, &mut self.scratch]) {
            v.resize(n, 0.0);
        }
    }
}

/// State at the end of the time span from `n_ref` fixed RK4 steps.
///
/// Fails when the max norm grows by more than `1e12` over its initial value,
/// which signals that the step is outside the RK4 stability region.
pub fn reference_solution<P: SemiDiscreteProblem + ?Sized>(prob: &P, n_ref: usize) -> Result<Vec<f64>, ProblemError> {
    let (t0, tf) = prob.time_span();
    let h = (tf - t0) / n_ref as f64;
    let mut y = prob.initial_state();
    let base = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut work = Rk4Work::default();
    for step in 0..n_ref {
        rk4_step(prob, t0 + step as f64 * h, h, &mut y, &mut work);
        let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !norm.is_finite() || norm > 1e12 * base {
            return Err(ProblemError::ReferenceFailure { step: step + 1, steps: n_ref });
        }
    }
    Ok(y)
}
