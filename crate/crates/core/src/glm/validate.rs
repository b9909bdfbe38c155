use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use super::order::check_distinct;
use super::{dimsim_b_matrix, starting_weight_matrix, ImexGlmMethod};

/// Tolerances applied by [`validate_method`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationTolerances {
    /// Triangularity, shared coefficients, preconsistency.
    pub structural: f64,
    /// Recomputed `B`, `Bhat` vs stored (tables are printed to 15 digits).
    pub b_reproduction: f64,
    /// Recomputed `Q`, `Qhat` vs stored.
    pub q_reproduction: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        Self {
            structural: 1e-12,
            b_reproduction: 1e-8,
            q_reproduction: 1e-12,
        }
    }
}

impl ValidationTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            structural: tol,
            b_reproduction: tol,
            q_reproduction: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodValidationReport {
    pub method: String,
    pub checks: Vec<CheckResult>,
}

impl MethodValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.push_with(name, residual, tolerance, residual <= tolerance);
    }

    fn push_with(&mut self, name: &str, residual: f64, tolerance: f64, passed: bool) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            residual,
            tolerance,
            passed,
        });
    }
}

impl fmt::Display for MethodValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method {}", self.method)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<28} {:>12.3e}  (tol {:.0e})  {}",
                c.name,
                c.residual,
                c.tolerance,
                if c.passed { "ok" } else { "FAIL" }
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Recomputes every derived coefficient and structural property of `m`.
/// Failures are report entries, never errors.
pub fn validate_method(m: &ImexGlmMethod, tol: ValidationTolerances) -> MethodValidationReport {
    let mut report = MethodValidationReport {
        method: m.name().to_string(),
        checks: Vec::new(),
    };
    let e = m.explicit();
    let i = m.implicit();
    let s = m.stages();
    let r = m.externals();

    // explicit: strictly lower triangular
    let mut upper_e = 0.0f64;
    let mut upper_i = 0.0f64;
    for row in 0..s {
        for col in row..s {
            upper_e = upper_e.max(e.a()[(row, col)].abs());
            if col > row {
                upper_i = upper_i.max(i.a()[(row, col)].abs());
            }
        }
    }
    report.push("explicit_strictly_lower", upper_e, tol.structural);
    report.push("implicit_lower_triangular", upper_i, tol.structural);
    let lambda = i.a()[(0, 0)];
    let diag_spread = (0..s).fold(0.0f64, |acc, k| acc.max((i.a()[(k, k)] - lambda).abs()));
    report.push("implicit_constant_diagonal", diag_spread, tol.structural);
    report.push_with(
        "implicit_diagonal_positive",
        (-lambda).max(0.0),
        0.0,
        lambda > 0.0,
    );

    let c = m.c();
    let shared = max_abs(&(e.u() - i.u()))
        .max(max_abs(&(e.v() - i.v())))
        .max((e.c() - i.c()).amax());
    report.push("shared_c_u_v", shared, tol.structural);

    let distinct = check_distinct(c).is_ok();
    let increasing = (1..s).all(|k| c[k] > c[k - 1]);
    let mut ends = c[0].abs();
    if s > 1 {
        ends = ends.max((c[s - 1] - 1.0).abs());
    }
    report.push_with(
        "abscissae_0_to_1_increasing",
        ends,
        tol.structural,
        increasing && ends <= tol.structural,
    );

    if e.u().nrows() == e.u().ncols() {
        let id = DMatrix::<f64>::identity(s, r);
        report.push("u_identity", max_abs(&(e.u() - id)), tol.structural);
    } else {
        report.push_with("u_identity", f64::MAX, tol.structural, false);
    }
    let row_sums = (0..r).fold(0.0f64, |acc, k| acc.max((e.v().row(k).sum() - 1.0).abs()));
    report.push("v_row_sums", row_sums, tol.structural);
    let rank_one = max_abs(&(e.v() - super::rank_one_v(m.v())));
    report.push("v_rank_one", rank_one, tol.structural);
    report.push("v_sum", (m.v().sum() - 1.0).abs(), tol.structural);

    let dimsim_class = r == s && e.order() == s && e.stage_order() == s;
    if distinct && dimsim_class {
        // order-condition relations only hold for p = q = r = s
        if let Ok(b) = dimsim_b_matrix(e.a(), c, m.v()) {
            report.push("b_explicit", max_abs(&(b - e.b())), tol.b_reproduction);
        }
        if let Ok(b) = dimsim_b_matrix(i.a(), c, m.v()) {
            report.push("b_implicit", max_abs(&(b - i.b())), tol.b_reproduction);
        }
    } else {
        report.push_with("b_reproducible", f64::MAX, tol.b_reproduction, false);
    }
    let p = e.order();
    let q = starting_weight_matrix(e.a(), c, p);
    let qhat = starting_weight_matrix(i.a(), c, p);
    if q.shape() == m.q().shape() {
        report.push("q_explicit", max_abs(&(q - m.q())), tol.q_reproduction);
        report.push("q_implicit", max_abs(&(qhat - m.qhat())), tol.q_reproduction);
    } else {
        report.push_with("q_shape", f64::MAX, tol.q_reproduction, false);
    }
    report
}
