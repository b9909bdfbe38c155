use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::glm::{dimsim_b_matrix, starting_weight_matrix, ImexGlmMethod};

use super::{constrained_region_area, StabilityError, StabilityQuery};

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    /// Maximum number of area evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Random starts are drawn uniformly from `[-range, range]`.
    pub range: f64,
    /// Random samples drawn before each simplex polish.
    pub samples_per_round: usize,
    /// Optional starting explicit `A`; evaluated first and never lost.
    pub initial: Option<DMatrix<f64>>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            budget: 2000,
            seed: 1,
            range: 3.0,
            samples_per_round: 20,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub method: ImexGlmMethod,
    pub area: f64,
    pub evaluations: usize,
    /// Best area after each evaluation.
    pub history: Vec<f64>,
}

fn unpack(x: &[f64], s: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(s, s);
    let mut k = 0;
    for i in 1..s {
        for j in 0..i {
            a[(i, j)] = x[k];
            k += 1;
        }
    }
    a
}

fn pack(a: &DMatrix<f64>) -> Vec<f64> {
    let s = a.nrows();
    (1..s).flat_map(|i| (0..i).map(move |j| (i, j))).map(|ij| a[ij]).collect()
}

/// Builds the IMEX pair whose explicit part has strictly lower triangular
/// `a`, with `B` and `Q` derived from the order conditions.
fn assemble(base: &ImexGlmMethod, a: DMatrix<f64>) -> Result<ImexGlmMethod, StabilityError> {
    let c = base.c();
    let b = dimsim_b_matrix(&a, c, base.v())?;
    let q = starting_weight_matrix(&a, c, base.order());
    Ok(base.with_explicit(a, b, q)?)
}

struct Objective<'a> {
    base: &'a ImexGlmMethod,
    query: &'a StabilityQuery,
    budget: usize,
    evaluations: usize,
    best: Option<(Vec<f64>, f64)>,
    history: Vec<f64>,
}

impl Objective<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    /// Negative area; `None` once the budget is spent.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        self.evaluations += 1;
        let s = self.base.stages();
        let area = match assemble(self.base, unpack(x, s)) {
            Ok(m) => constrained_region_area(&m, self.query).area_total,
            Err(_) => 0.0,
        };
        if self.best.as_ref().is_none_or(|(_, b)| area > *b) {
            self.best = Some((x.to_vec(), area));
        }
        self.history.push(self.best.as_ref().map_or(0.0, |b| b.1));
        Some(-area)
    }
}

/// Downhill simplex from `x0` with initial edge `step`, until the budget is
/// exhausted or the simplex collapses below `xtol`.
fn nelder_mead(obj: &mut Objective<'_>, x0: &[f64], f0: Option<f64>, step: f64, xtol: f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f) = f0.or_else(|| obj.eval(x0)) else { return };
    simplex.push((x0.to_vec(), f));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += step;
        let Some(f) = obj.eval(&x) else { return };
        simplex.push((x, f));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < xtol {
            return;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(1.0);
        let Some(fr) = obj.eval(&xr) else { return };
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let Some(fe) = obj.eval(&xe) else { return };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, t) = if fr < worst.1 { (along(0.5), fr) } else { (along(-0.5), worst.1) };
        let Some(fc) = obj.eval(&xc) else { return };
        if fc < t {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let Some(f) = obj.eval(&x) else { return };
            *vertex = (x, f);
        }
    }
}

/// Maximizes the constrained-region area over the `s(s-1)/2` free entries of
/// the explicit `A`, keeping the implicit part, `c` and `v` of `base`.
///
/// Rounds alternate between a batch of random samples, a simplex polish from
/// the best sample, and a finer polish from the incumbent.
pub fn optimize_explicit_component(
    base: &ImexGlmMethod,
    query: &StabilityQuery,
    cfg: &OptimizeConfig,
) -> Result<OptimizeResult, StabilityError> {
    query.check()?;
    let s = base.stages();
    let dim = s * (s - 1) / 2;
    let mut obj = Objective {
        base,
        query,
        budget: cfg.budget.max(1),
        evaluations: 0,
        best: None,
        history: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if let Some(a) = &cfg.initial {
        if a.nrows() != s || a.ncols() != s {
            return Err(crate::glm::GlmError::shape("A", format!("{s}x{s}"), format!("{}x{}", a.nrows(), a.ncols())).into());
        }
        obj.eval(&pack(a));
    }
    if dim == 0 {
        if obj.best.is_none() {
            obj.eval(&[]);
        }
    } else {
        let mut step = 0.25 * cfg.range;
        if let Some((x, f)) = obj.best.clone() {
            nelder_mead(&mut obj, &x, Some(-f), 0.05 * cfg.range, 1e-4);
        }
        while !obj.exhausted() {
            let mut round_best: Option<(Vec<f64>, f64)> = None;
            for _ in 0..cfg.samples_per_round {
                let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-cfg.range..=cfg.range)).collect();
                let Some(f) = obj.eval(&x) else { break };
                if round_best.as_ref().is_none_or(|(_, b)| f < *b) {
                    round_best = Some((x, f));
                }
            }
            if let Some((x, f)) = round_best {
                nelder_mead(&mut obj, &x, Some(f), step, 1e-4);
            }
            if let Some((x, f)) = obj.best.clone() {
                nelder_mead(&mut obj, &x, Some(-f), 0.1 * step, 1e-5);
            }
            step = (0.7 * step).max(0.02 * cfg.range);
        }
    }
    let evaluations = obj.evaluations;
    let (x, area) = obj.best.ok_or(StabilityError::OptimizationFailed(evaluations))?;
    if area <= 0.0 {
        return Err(StabilityError::OptimizationFailed(evaluations));
    }
    let method = assemble(base, unpack(&x, s))?.renamed(format!("{}-optimized", base.name()));
    Ok(OptimizeResult {
        method,
        area,
        evaluations,
        history: obj.history,
    })
}
