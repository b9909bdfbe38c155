use std::collections::HashMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::glm::{read_method_file, GlmError, ImexGlmMethod};
use crate::integrator::{
    integrate, integrate_ark, SemiDiscreteProblem, StageSolveConfig, StartingConfig,
};
use crate::linalg::StiffJacobian;
use crate::methods::{builtin_by_name, load_ark_method, ImexRkMethod};
use crate::problems::{reference_solution, AllenCahn, Burgers, DahlquistSplit, PdeBenchmark};

use super::HarnessError;

/// Problem selector with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    AllenCahn { n: usize },
    Burgers { n: usize },
    Dahlquist { xi: Complex64, xi_hat: Complex64 },
}

impl ProblemSpec {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "allen-cahn" => Ok(Self::AllenCahn { n: AllenCahn::DEFAULT_N }),
            "burgers" => Ok(Self::Burgers { n: Burgers::DEFAULT_N }),
            "dahlquist" => Ok(Self::Dahlquist {
                xi: Complex64::new(-1.0, 0.0),
                xi_hat: Complex64::new(-2.0, 0.0),
            }),
            other => Err(HarnessError::Spec(format!(
                "unknown problem '{other}' (expected allen-cahn, burgers or dahlquist)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::AllenCahn { .. } => "allen-cahn",
            Self::Burgers { .. } => "burgers",
            Self::Dahlquist { .. } => "dahlquist",
        }
    }

    /// Key identifying the reference solution.
    pub fn key(&self) -> String {
        match self {
            Self::AllenCahn { n } | Self::Burgers { n } => format!("{}:{n}", self.name()),
            Self::Dahlquist { xi, xi_hat } => format!("dahlquist:{xi}:{xi_hat}"),
        }
    }

    /// Default reference step count (`None`: the exact solution is used).
    pub fn default_reference_steps(&self) -> Option<usize> {
        match self {
            Self::AllenCahn { .. } => Some(5_000),
            Self::Burgers { .. } => Some(20_000),
            Self::Dahlquist { .. } => None,
        }
    }

    pub fn build(&self) -> Result<Benchmark, HarnessError> {
        Ok(match *self {
            Self::AllenCahn { n } => Benchmark::AllenCahn(AllenCahn::new(n)?),
            Self::Burgers { n } => Benchmark::Burgers(Burgers::new(n)?),
            Self::Dahlquist { xi, xi_hat } => {
                Benchmark::Dahlquist(DahlquistSplit::new(xi, xi_hat, Complex64::new(1.0, 0.0), 1.0))
            }
        })
    }
}

/// Concrete benchmark problem.
#[derive(Debug, Clone)]
pub enum Benchmark {
    AllenCahn(AllenCahn),
    Burgers(Burgers),
    Dahlquist(DahlquistSplit),
}

impl Benchmark {
    fn inner(&self) -> &dyn SemiDiscreteProblem {
        match self {
            Self::AllenCahn(p) => p,
            Self::Burgers(p) => p,
            Self::Dahlquist(p) => p,
        }
    }

    pub fn as_pde(&self) -> Option<&dyn PdeBenchmark> {
        match self {
            Self::AllenCahn(p) => Some(p),
            Self::Burgers(p) => Some(p),
            Self::Dahlquist(_) => None,
        }
    }
}

impl SemiDiscreteProblem for Benchmark {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn time_span(&self) -> (f64, f64) {
        self.inner().time_span()
    }
    fn initial_state(&self) -> Vec<f64> {
        self.inner().initial_state()
    }
    fn nonstiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.inner().nonstiff(t, y, out)
    }
    fn stiff(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.inner().stiff(t, y, out)
    }
    fn stiff_jacobian(&self, t: f64, y: &[f64]) -> StiffJacobian {
        self.inner().stiff_jacobian(t, y)
    }
    fn stiff_is_linear(&self) -> bool {
        self.inner().stiff_is_linear()
    }
}

/// A time integrator: an IMEX-GLM or an additive Runge-Kutta comparator.
#[derive(Debug, Clone)]
pub enum Integrator {
    Glm(ImexGlmMethod),
    Ark(ImexRkMethod),
}

/// Outcome of one fixed-step run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub solution: Vec<f64>,
    pub h: f64,
    pub step_seconds: f64,
    pub start_seconds: f64,
}

impl Integrator {
    pub fn name(&self) -> &str {
        match self {
            Self::Glm(m) => m.name(),
            Self::Ark(m) => m.name(),
        }
    }

    pub fn run<P: SemiDiscreteProblem + ?Sized>(
        &self,
        prob: &P,
        steps: usize,
        start: &StartingConfig,
        cfg: &StageSolveConfig,
    ) -> Result<RunOutput, HarnessError> {
        Ok(match self {
            Self::Glm(m) => {
                let r = integrate(m, prob, steps, start, cfg)?;
                RunOutput {
                    solution: r.solution,
                    h: r.h,
                    step_seconds: r.step_seconds,
                    start_seconds: r.start_seconds,
                }
            }
            Self::Ark(m) => {
                let r = integrate_ark(m, prob, steps, cfg)?;
                RunOutput {
                    solution: r.solution,
                    h: r.h,
                    step_seconds: r.step_seconds,
                    start_seconds: 0.0,
                }
            }
        })
    }
}

/// Method selector: a built-in name or a JSON file (GLM or ARK format).
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Builtin(String),
    File(PathBuf),
}

impl MethodSpec {
    pub fn parse(s: &str) -> Self {
        if builtin_by_name(s).is_some() {
            Self::Builtin(s.to_string())
        } else {
            Self::File(PathBuf::from(s))
        }
    }

    pub fn resolve(&self) -> Result<Integrator, HarnessError> {
        match self {
            Self::Builtin(name) => builtin_by_name(name)
                .map(Integrator::Glm)
                .ok_or_else(|| HarnessError::Spec(format!("unknown built-in method '{name}'"))),
            Self::File(path) => load_method_path(path),
        }
    }

    /// Resolves to an IMEX-GLM, rejecting ARK files.
    pub fn resolve_glm(&self) -> Result<ImexGlmMethod, HarnessError> {
        match self.resolve()? {
            Integrator::Glm(m) => Ok(m),
            Integrator::Ark(m) => Err(HarnessError::Spec(format!(
                "'{}' is an additive Runge-Kutta method; an IMEX-GLM is required",
                m.name()
            ))),
        }
    }
}

fn load_method_path(path: &Path) -> Result<Integrator, HarnessError> {
    if !path.exists() {
        return Err(HarnessError::Spec(format!(
            "'{}' is neither a built-in method (dimsim4, dimsim5, imex-euler) nor an existing file",
            path.display()
        )));
    }
    match read_method_file(path) {
        Ok(m) => Ok(Integrator::Glm(m)),
        Err(glm_err @ (GlmError::Parse { .. } | GlmError::Shape { .. })) => match load_ark_method(path) {
            Ok(m) => Ok(Integrator::Ark(m)),
            // report the GLM error unless the file looks like an ARK file
            Err(ark_err) => {
                let text = std::fs::read_to_string(path).unwrap_or_default();
                Err(if text.contains("A_explicit") { ark_err } else { glm_err }.into())
            }
        },
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceConfig {
    /// RK4 steps; `None` uses the problem default.
    pub steps: Option<usize>,
    /// Also run with twice the steps and report the difference.
    pub self_check: bool,
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub solution: Vec<f64>,
    /// RK4 steps used, `None` for the exact solution.
    pub steps: Option<usize>,
    /// Max-norm change when doubling the step count.
    pub self_check: Option<f64>,
}

/// Reference solutions keyed by problem and resolution, computed once.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    entries: HashMap<(String, Option<usize>, bool), Reference>,
    computed: usize,
}

impl ReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of references computed (cache misses).
    pub fn computed(&self) -> usize {
        self.computed
    }

    pub fn get(
        &mut self,
        spec: &ProblemSpec,
        prob: &Benchmark,
        cfg: &ReferenceConfig,
    ) -> Result<&Reference, HarnessError> {
        let steps = cfg.steps.or(spec.default_reference_steps());
        let key = (spec.key(), steps, cfg.self_check);
        if !self.entries.contains_key(&key) {
            let reference = compute_reference(prob, steps, cfg.self_check)?;
            self.computed += 1;
            self.entries.insert(key.clone(), reference);
        }
        Ok(&self.entries[&key])
    }
}

fn compute_reference(prob: &Benchmark, steps: Option<usize>, self_check: bool) -> Result<Reference, HarnessError> {
    if let (Benchmark::Dahlquist(p), None) = (prob, steps) {
        let (_, tf) = p.time_span();
        return Ok(Reference {
            solution: p.exact_state(tf),
            steps: None,
            self_check: None,
        });
    }
    let n = steps.ok_or_else(|| HarnessError::Spec("reference step count required".into()))?;
    log::info!("computing RK4 reference with {n} steps");
    let solution = reference_solution(prob, n)?;
    let check = if self_check {
        let fine = reference_solution(prob, 2 * n)?;
        Some(
            solution
                .iter()
                .zip(&fine)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    Ok(Reference {
        solution,
        steps: Some(n),
        self_check: check,
    })
}

/// Everything needed for a convergence or work-precision study.
#[derive(Debug, Clone)]
pub struct StudySpec {
    pub problem: ProblemSpec,
    pub method: MethodSpec,
    pub steps: Vec<usize>,
    pub reference: ReferenceConfig,
    pub start: StartingConfig,
    pub solver: StageSolveConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl StudySpec {
    pub fn new(problem: ProblemSpec, method: MethodSpec, steps: Vec<usize>) -> Self {
        Self {
            problem,
            method,
            steps,
            reference: ReferenceConfig::default(),
            start: StartingConfig::default(),
            solver: StageSolveConfig::default(),
            out: None,
            seed: 1,
        }
    }

    /// Step counts must be positive and strictly increasing, at least three
    /// of them for order estimates.
    pub fn check(&self) -> Result<(), HarnessError> {
        if self.steps.len() < 3 {
            return Err(HarnessError::Spec("at least three step counts are required".into()));
        }
        if self.steps[0] == 0 || self.steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Spec("step counts must be positive and strictly increasing".into()));
        }
        Ok(())
    }
}
