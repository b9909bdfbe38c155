use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::problems::l2_error;

use super::study::{Benchmark, Integrator, ReferenceCache, RunOutput, StudySpec};
use super::HarnessError;

/// Repeats per work-precision point; the minimum time is reported.
const TIMING_REPEATS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    /// `None` when the run failed.
    pub error: Option<f64>,
    /// `log2(E_prev / E)` scaled by the step ratio; `None` on the first row.
    pub pairwise_order: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub method: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log E` against `log N`, negated.
    pub slope: Option<f64>,
}

/// Observed orders between consecutive rows:
/// `log(E_i / E_{i+1}) / log(N_{i+1} / N_i)`, which is `log2(E_N / E_2N)`
/// for doubling.
pub fn pairwise_orders(steps: &[usize], errors: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = vec![None; steps.len()];
    for i in 1..steps.len() {
        if let (Some(a), Some(b)) = (errors[i - 1], errors[i]) {
            if a > 0.0 && b > 0.0 {
                out[i] = Some((a / b).ln() / (steps[i] as f64 / steps[i - 1] as f64).ln());
            }
        }
    }
    out
}

/// Order from a least-squares fit of `log E = c - p log N` over the
/// successful rows; `None` with fewer than two usable points.
pub fn least_squares_slope(steps: &[usize], errors: &[Option<f64>]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter_map(|(&n, e)| match e {
            Some(e) if *e > 0.0 && e.is_finite() => Some(((n as f64).ln(), e.ln())),
            _ => None,
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

struct Prepared {
    problem: Benchmark,
    method: Integrator,
    reference: Vec<f64>,
}

fn prepare(spec: &StudySpec, cache: &mut ReferenceCache) -> Result<Prepared, HarnessError> {
    spec.check()?;
    let problem = spec.problem.build()?;
    let method = spec.method.resolve()?;
    let reference = cache.get(&spec.problem, &problem, &spec.reference)?.solution.clone();
    Ok(Prepared {
        problem,
        method,
        reference,
    })
}

fn run_one(spec: &StudySpec, p: &Prepared, n: usize) -> Result<(RunOutput, f64), HarnessError> {
    let out = p.method.run(&p.problem, n, &spec.start, &spec.solver)?;
    let err = l2_error(&out.solution, &p.reference)?;
    if !err.is_finite() {
        return Err(HarnessError::Spec(format!("non-finite error at N = {n}")));
    }
    Ok((out, err))
}

fn step_size(p: &Benchmark, n: usize) -> f64 {
    use crate::integrator::SemiDiscreteProblem;
    let (t0, tf) = p.time_span();
    (tf - t0) / n as f64
}

pub fn run_convergence(spec: &StudySpec) -> Result<ConvergenceTable, HarnessError> {
    run_convergence_with(spec, &mut ReferenceCache::new())
}

/// Convergence study sharing reference solutions through `cache`. Runs for
/// different `N` execute in parallel; a failing run is recorded in its row.
pub fn run_convergence_with(spec: &StudySpec, cache: &mut ReferenceCache) -> Result<ConvergenceTable, HarnessError> {
    let p = prepare(spec, cache)?;
    let results: Vec<Result<f64, String>> = spec
        .steps
        .par_iter()
        .map(|&n| run_one(spec, &p, n).map(|r| r.1).map_err(|e| e.to_string()))
        .collect();
    let errors: Vec<Option<f64>> = results.iter().map(|r| r.as_ref().ok().copied()).collect();
    let orders = pairwise_orders(&spec.steps, &errors);
    let rows = spec
        .steps
        .iter()
        .zip(results)
        .zip(orders)
        .map(|((&n, res), order)| ConvergenceRow {
            n,
            h: step_size(&p.problem, n),
            error: res.as_ref().ok().copied(),
            pairwise_order: order,
            failure: res.err(),
        })
        .collect();
    Ok(ConvergenceTable {
        problem: spec.problem.name().to_string(),
        method: p.method.name().to_string(),
        slope: least_squares_slope(&spec.steps, &errors),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkPrecisionRow {
    pub n: usize,
    pub h: f64,
    /// Minimum step-phase wall time over the repeats.
    pub seconds: Option<f64>,
    pub error: Option<f64>,
    /// Starting-procedure time of the fastest repeat, reported separately.
    pub start_seconds: Option<f64>,
    /// `(max - min) / min` over the repeats.
    pub timing_spread: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkPrecisionTable {
    pub problem: String,
    pub method: String,
    pub repeats: usize,
    pub rows: Vec<WorkPrecisionRow>,
}

/// Work-precision study. Runs are sequential so timings do not compete for
/// cores; each point is repeated and the minimum time kept. The reference
/// computation and the starting procedure are excluded from `seconds`.
pub fn run_workprecision(spec: &StudySpec, cache: &mut ReferenceCache) -> Result<WorkPrecisionTable, HarnessError> {
    let p = prepare(spec, cache)?;
    let mut rows = Vec::with_capacity(spec.steps.len());
    for &n in &spec.steps {
        let h = step_size(&p.problem, n);
        let mut times = Vec::with_capacity(TIMING_REPEATS);
        let mut starts = Vec::with_capacity(TIMING_REPEATS);
        let mut error = None;
        let mut failure = None;
        for _ in 0..TIMING_REPEATS {
            let clock = Instant::now();
            match run_one(spec, &p, n) {
                Ok((out, e)) => {
                    log::debug!("N = {n}: {:.3e} s total", clock.elapsed().as_secs_f64());
                    times.push(out.step_seconds);
                    starts.push(out.start_seconds);
                    error = Some(e);
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let row = if failure.is_some() {
            WorkPrecisionRow {
                n,
                h,
                seconds: None,
                error: None,
                start_seconds: None,
                timing_spread: None,
                failure,
            }
        } else {
            let (imin, &min) = times
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("at least one repeat");
            let max = times.iter().copied().fold(0.0, f64::max);
            WorkPrecisionRow {
                n,
                h,
                seconds: Some(min),
                error,
                start_seconds: Some(starts[imin]),
                timing_spread: Some(if min > 0.0 { (max - min) / min } else { 0.0 }),
                failure: None,
            }
        };
        rows.push(row);
    }
    Ok(WorkPrecisionTable {
        problem: spec.problem.name().to_string(),
        method: p.method.name().to_string(),
        repeats: TIMING_REPEATS,
        rows,
    })
}
