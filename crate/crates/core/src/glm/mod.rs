//! General linear method tableaus, DIMSIM order-condition machinery,
//! validation and coefficient files.

pub(crate) mod io;
mod order;
mod validate;

pub use io::{method_from_json, method_to_json, read_method_file, write_method_file};
pub use order::{dimsim_b_matrix, nodal_polynomials, starting_weight_matrix, NodalTable};
pub use validate::{validate_method, CheckResult, MethodValidationReport, ValidationTolerances};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GlmError {
    #[error("abscissae are not distinct: c[{i}] = c[{j}] = {value}")]
    DistinctNodes { i: usize, j: usize, value: f64 },
    #[error("shape error in `{field}`: expected {expected}, found {found}")]
    Shape {
        field: String,
        expected: String,
        found: String,
    },
    #[error("parse error in `{field}`: {reason}")]
    Parse { field: String, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl GlmError {
    pub(crate) fn shape(field: &str, expected: impl ToString, found: impl ToString) -> Self {
        GlmError::Shape {
            field: field.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauKind {
    Explicit,
    Implicit,
}

/// One component `(A, B, U, V, c)` of a general linear method.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmTableau {
    kind: TableauKind,
    order: usize,
    stage_order: usize,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    c: DVector<f64>,
}

impl GlmTableau {
    /// Checks shapes only; structural properties are left to [`validate_method`]
    /// so that malformed-but-parseable methods can still be inspected.
    pub fn new(
        kind: TableauKind,
        order: usize,
        stage_order: usize,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        u: DMatrix<f64>,
        v: DMatrix<f64>,
        c: DVector<f64>,
    ) -> Result<Self, GlmError> {
        let s = c.len();
        if s == 0 {
            return Err(GlmError::shape("c", "at least one stage", 0));
        }
        let r = v.nrows();
        check_shape("A", &a, s, s)?;
        check_shape("B", &b, r, s)?;
        check_shape("U", &u, s, r)?;
        check_shape("V", &v, r, r)?;
        if order == 0 || stage_order == 0 {
            return Err(GlmError::shape("p/q", "positive", 0));
        }
        Ok(Self {
            kind,
            order,
            stage_order,
            a,
            b,
            u,
            v,
            c,
        })
    }

    pub fn kind(&self) -> TableauKind {
        self.kind
    }
    /// Number of internal stages `s`.
    pub fn stages(&self) -> usize {
        self.c.len()
    }
    /// Number of external stages `r`.
    pub fn externals(&self) -> usize {
        self.v.nrows()
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn stage_order(&self) -> usize {
        self.stage_order
    }
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// Diagonal element `a_11` (λ for DIMSIMs of type 2).
    pub fn diagonal(&self) -> f64 {
        self.a[(0, 0)]
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.stages()).all(|i| (i + 1..self.stages()).all(|j| self.a[(i, j)] == 0.0))
    }
}

pub(crate) fn check_shape(
    field: &str,
    m: &DMatrix<f64>,
    rows: usize,
    cols: usize,
) -> Result<(), GlmError> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(GlmError::shape(
            field,
            format!("{rows}x{cols}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

/// An implicit-explicit GLM pair sharing `c`, `U` and `V`, together with the
/// starting-weight matrices used to build the initial external vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ImexGlmMethod {
    name: String,
    explicit: GlmTableau,
    implicit: GlmTableau,
    v: DVector<f64>,
    q: DMatrix<f64>,
    qhat: DMatrix<f64>,
}

impl ImexGlmMethod {
    /// Assembles a DIMSIM pair with `U = I` and `V = 1 v^T`.
    #[allow(clippy::too_many_arguments)]
    pub fn dimsim(
        name: impl Into<String>,
        order: usize,
        stage_order: usize,
        c: DVector<f64>,
        a: DMatrix<f64>,
        ahat: DMatrix<f64>,
        b: DMatrix<f64>,
        bhat: DMatrix<f64>,
        v: DVector<f64>,
        q: DMatrix<f64>,
        qhat: DMatrix<f64>,
    ) -> Result<Self, GlmError> {
        let s = c.len();
        if v.len() != s {
            return Err(GlmError::shape("v", s, v.len()));
        }
        let u = DMatrix::identity(s, s);
        let vm = rank_one_v(&v);
        let explicit = GlmTableau::new(
            TableauKind::Explicit,
            order,
            stage_order,
            a,
            b,
            u.clone(),
            vm.clone(),
            c.clone(),
        )?;
        let implicit =
            GlmTableau::new(TableauKind::Implicit, order, stage_order, ahat, bhat, u, vm, c)?;
        Self::from_parts(name, explicit, implicit, v, q, qhat)
    }

    /// General constructor; requires matching shapes between the two parts.
    pub fn from_parts(
        name: impl Into<String>,
        explicit: GlmTableau,
        implicit: GlmTableau,
        v: DVector<f64>,
        q: DMatrix<f64>,
        qhat: DMatrix<f64>,
    ) -> Result<Self, GlmError> {
        let s = explicit.stages();
        let r = explicit.externals();
        if implicit.stages() != s || implicit.externals() != r {
            return Err(GlmError::shape(
                "implicit",
                format!("s={s}, r={r}"),
                format!("s={}, r={}", implicit.stages(), implicit.externals()),
            ));
        }
        if v.len() != r {
            return Err(GlmError::shape("v", r, v.len()));
        }
        let p = explicit.order();
        check_shape("Q", &q, r, p + 1)?;
        check_shape("Qhat", &qhat, r, p + 1)?;
        Ok(Self {
            name: name.into(),
            explicit,
            implicit,
            v,
            q,
            qhat,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn explicit(&self) -> &GlmTableau {
        &self.explicit
    }
    pub fn implicit(&self) -> &GlmTableau {
        &self.implicit
    }
    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }
    pub fn qhat(&self) -> &DMatrix<f64> {
        &self.qhat
    }
    pub fn stages(&self) -> usize {
        self.explicit.stages()
    }
    pub fn externals(&self) -> usize {
        self.explicit.externals()
    }
    pub fn order(&self) -> usize {
        self.explicit.order()
    }
    pub fn c(&self) -> &DVector<f64> {
        self.explicit.c()
    }

    /// Index of the stage whose abscissa equals 1, if any. Its value is the
    /// solution approximation at the end of a step.
    pub fn solution_stage(&self) -> Option<usize> {
        (0..self.stages()).rev().find(|&i| self.c()[i] == 1.0)
    }

    /// Replaces the explicit `A` and `B`, keeping everything else.
    pub fn with_explicit(
        &self,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        q: DMatrix<f64>,
    ) -> Result<Self, GlmError> {
        let e = &self.explicit;
        let explicit = GlmTableau::new(
            TableauKind::Explicit,
            e.order(),
            e.stage_order(),
            a,
            b,
            e.u().clone(),
            e.v().clone(),
            e.c().clone(),
        )?;
        Self::from_parts(
            self.name.clone(),
            explicit,
            self.implicit.clone(),
            self.v.clone(),
            q,
            self.qhat.clone(),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// `V = 1 v^T`.
pub fn rank_one_v(v: &DVector<f64>) -> DMatrix<f64> {
    let r = v.len();
    DMatrix::from_fn(r, r, |_, j| v[j])
}
