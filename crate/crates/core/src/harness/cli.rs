use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::glm::{validate_method, write_method_file, ValidationTolerances};
use crate::problems::{l2_error, write_node_csv, NodeValue};
use crate::stability::{constrained_region_area, optimize_explicit_component, OptimizeConfig, StabilityQuery};

use super::output::{
    write_convergence_csv, write_convergence_json, write_workprecision_csv, write_workprecision_json,
};
use super::stability_out::emit_stability;
use super::study::{Benchmark, Integrator, MethodSpec, ProblemSpec, ReferenceCache, ReferenceConfig, StudySpec};
use super::tables::{run_convergence_with, run_workprecision};
use super::HarnessError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "imex-glm", version, about = "IMEX general linear methods: validation, integration, studies and stability regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct MethodArg {
    /// dimsim4, dimsim5, imex-euler or a JSON method file
    #[arg(long, default_value = "dimsim4")]
    method: String,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    method: MethodArg,
    /// allen-cahn, burgers or dahlquist
    #[arg(long, default_value = "allen-cahn")]
    problem: String,
    /// Grid intervals per direction for the 2D problems
    #[arg(long)]
    grid: Option<usize>,
    /// Micro-step of the starting procedure as a fraction of h
    #[arg(long, default_value_t = 0.5)]
    tau_ratio: f64,
    /// RK4 steps for the reference solution
    #[arg(long)]
    reference_steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a method's structure and order conditions
    ValidateMethod(MethodArg),
    /// Integrate one problem with a fixed number of steps
    Integrate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "100")]
        steps: usize,
    },
    /// Errors and observed orders for a list of step counts
    Converge {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        steps: Vec<usize>,
    },
    /// Step-phase wall time against error
    WorkPrecision {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        steps: Vec<usize>,
    },
    /// Write region boundaries and the constrained-region area
    Stability {
        #[command(flatten)]
        method: MethodArg,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Sector half-angle (radians) for the area report
        #[arg(long, default_value_t = FRAC_PI_2)]
        alpha: f64,
    },
    /// Maximize the constrained-region area over the explicit coefficients
    OptimizeExplicit {
        #[command(flatten)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Maximum number of area evaluations
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        /// Where to write the optimized method (JSON)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn study(run: &RunArgs, steps: Vec<usize>) -> Result<StudySpec, HarnessError> {
    let mut problem = ProblemSpec::parse(&run.problem)?;
    if let Some(n) = run.grid {
        match &mut problem {
            ProblemSpec::AllenCahn { n: g } | ProblemSpec::Burgers { n: g } => *g = n,
            ProblemSpec::Dahlquist { .. } => {
                return Err(HarnessError::Spec("--grid does not apply to the dahlquist problem".into()))
            }
        }
    }
    let mut spec = StudySpec::new(problem, MethodSpec::parse(&run.method.method), steps);
    spec.start.tau_ratio = run.tau_ratio;
    spec.reference = ReferenceConfig {
        steps: run.reference_steps,
        self_check: false,
    };
    spec.out = run.out.clone();
    Ok(spec)
}

fn run(cmd: Command) -> Result<i32, HarnessError> {
    match cmd {
        Command::ValidateMethod(m) => match MethodSpec::parse(&m.method).resolve()? {
            Integrator::Glm(method) => {
                let report = validate_method(&method, ValidationTolerances::default());
                println!("{report}");
                Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION })
            }
            // parsing already checked shapes and abscissae
            Integrator::Ark(method) => {
                println!("{}: additive Runge-Kutta method with {} stages, parsed", method.name(), method.stages());
                Ok(EXIT_OK)
            }
        },
        Command::Integrate { run, steps } => {
            let spec = study(&run, vec![steps])?;
            let problem = spec.problem.build()?;
            let method = spec.method.resolve()?;
            let out = method.run(&problem, steps, &spec.start, &spec.solver)?;
            let mut cache = ReferenceCache::new();
            let reference = cache.get(&spec.problem, &problem, &spec.reference)?;
            let err = l2_error(&out.solution, &reference.solution)?;
            eprintln!(
                "{} on {}: N = {steps}, h = {:.6e}, error = {err:.6e}, step time {:.3e} s, start time {:.3e} s",
                method.name(),
                spec.problem.name(),
                out.h,
                out.step_seconds,
                out.start_seconds
            );
            write_solution(sink(&run.out)?, &problem, &out.solution, run.format)?;
            Ok(EXIT_OK)
        }
        Command::Converge { run, steps } => {
            let spec = study(&run, steps)?;
            let table = run_convergence_with(&spec, &mut ReferenceCache::new())?;
            let mut w = sink(&run.out)?;
            match run.format {
                Format::Csv => write_convergence_csv(&mut w, &table)?,
                Format::Json => write_convergence_json(&mut w, &table)?,
            }
            w.flush()?;
            for r in table.rows.iter().filter(|r| r.failure.is_some()) {
                eprintln!("N = {}: {}", r.n, r.failure.as_deref().unwrap_or_default());
            }
            match table.slope {
                Some(p) => eprintln!("{} on {}: least-squares order {p:.3}", table.method, table.problem),
                None => eprintln!("{} on {}: too few successful runs for an order", table.method, table.problem),
            }
            Ok(EXIT_OK)
        }
        Command::WorkPrecision { run, steps } => {
            let spec = study(&run, steps)?;
            let table = run_workprecision(&spec, &mut ReferenceCache::new())?;
            let mut w = sink(&run.out)?;
            match run.format {
                Format::Csv => write_workprecision_csv(&mut w, &table)?,
                Format::Json => write_workprecision_json(&mut w, &table)?,
            }
            w.flush()?;
            for r in &table.rows {
                if let Some(f) = &r.failure {
                    eprintln!("N = {}: {f}", r.n);
                } else if let Some(s) = r.start_seconds {
                    eprintln!("N = {}: starting procedure {s:.3e} s (excluded)", r.n);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Stability { method, out, alpha } => {
            let m = MethodSpec::parse(&method.method).resolve_glm()?;
            let q = StabilityQuery::default().with_alpha(alpha);
            let files = emit_stability(&m, &q, &out)?;
            for path in files.all() {
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
        Command::OptimizeExplicit { method, seed, budget, out } => {
            let base = MethodSpec::parse(&method.method).resolve_glm()?;
            let q = StabilityQuery::default();
            let before = constrained_region_area(&base, &q).area_total;
            let cfg = OptimizeConfig {
                budget,
                seed,
                // start from the base coefficients so the result never loses area
                initial: Some(base.explicit().a().clone()),
                ..OptimizeConfig::default()
            };
            let result = optimize_explicit_component(&base, &q, &cfg)?;
            println!(
                "{}: area {before:.6} -> {:.6} after {} evaluations",
                base.name(),
                result.area,
                result.evaluations
            );
            if let Some(path) = out {
                write_method_file(&result.method, &path)?;
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_solution(mut w: Box<dyn Write>, problem: &Benchmark, y: &[f64], format: Format) -> Result<(), HarnessError> {
    match (problem.as_pde(), format) {
        (Some(pde), Format::Csv) => {
            let grid = pde.grid();
            let nodes: Vec<NodeValue> = (0..grid.len())
                .map(|k| {
                    let (i, j) = grid.node(k);
                    NodeValue {
                        i,
                        j,
                        x: grid.coord(i),
                        y: grid.coord(j),
                        value: y[k],
                    }
                })
                .collect();
            write_node_csv(&mut w, &nodes)?;
        }
        (None, Format::Csv) => {
            writeln!(w, "component,value")?;
            for (k, v) in y.iter().enumerate() {
                writeln!(w, "{k},{v:.16e}")?;
            }
        }
        (_, Format::Json) => {
            serde_json::to_writer(&mut w, y).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
