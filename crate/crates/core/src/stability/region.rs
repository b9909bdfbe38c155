use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::glm::ImexGlmMethod;
use crate::linalg::{is_schur_stable, spectral_radius};

use super::matrix::StabilityKernel;
use super::StabilityError;

/// Parameters of the constrained stability region and of its area estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityQuery {
    /// Stiff magnitudes `|what|`; must contain 0.
    pub magnitudes: Vec<f64>,
    /// Ray angles measured from the negative real axis, symmetric about 0.
    pub angles: Vec<f64>,
    /// Sector half-angle; rays with `|theta| > alpha` are dropped.
    pub alpha: f64,
    pub tol: f64,
    /// Initial upper ordinate of the bisections.
    pub y_top: f64,
    /// Number of vertical lines.
    pub lines: usize,
}

impl Default for StabilityQuery {
    fn default() -> Self {
        Self {
            magnitudes: std::iter::once(0.0)
                .chain((-3..=3).map(|k| 10f64.powi(k)))
                .collect(),
            angles: equally_spaced_angles(33),
            alpha: FRAC_PI_2,
            tol: 1e-3,
            y_top: 8.0,
            lines: 30,
        }
    }
}

/// `count` equally spaced angles in `[-pi/2, pi/2]`.
pub fn equally_spaced_angles(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|k| -FRAC_PI_2 + k as f64 * std::f64::consts::PI / (count - 1) as f64)
            .collect(),
    }
}

impl StabilityQuery {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn check(&self) -> Result<(), StabilityError> {
        if !(self.tol > 0.0) || !(self.y_top > self.tol) {
            return Err(StabilityError::Query("tol must be positive and below y_top".into()));
        }
        if !self.magnitudes.contains(&0.0) || self.magnitudes.iter().any(|m| *m < 0.0) {
            return Err(StabilityError::Query("magnitudes must be >= 0 and contain 0".into()));
        }
        let mut sorted = self.angles.clone();
        sorted.sort_by(f64::total_cmp);
        let symmetric = sorted
            .iter()
            .zip(sorted.iter().rev())
            .all(|(a, b)| (a + b).abs() < 1e-12);
        if !symmetric {
            return Err(StabilityError::Query("angles must be symmetric about 0".into()));
        }
        if self.lines < 2 {
            return Err(StabilityError::Query("need at least two vertical lines".into()));
        }
        Ok(())
    }

    /// Stiff values `-r e^{i theta}`; `0` appears once.
    pub fn stiff_points(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        for &r in self.magnitudes.iter().filter(|&&r| r > 0.0) {
            for &th in self.angles.iter().filter(|&&th| th.abs() <= self.alpha + 1e-12) {
                pts.push(-Complex64::from_polar(r, th));
            }
        }
        pts
    }
}

/// Which stability region to trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    /// `S_alpha`: `w` such that `M(w, what)` is stable for every stiff grid value.
    Constrained,
    /// `S`: the explicit component alone, `what = 0`.
    Explicit,
    /// `Shat`: the implicit component alone, `w = 0`.
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMaximum {
    pub rho: f64,
    /// Grid points where `I - w A - what Ahat` was singular.
    pub singular: usize,
}

/// `max rho(M(w, what))` over the stiff grid of `q`.
pub fn max_rho_over_stiff_grid(m: &ImexGlmMethod, w: Complex64, q: &StabilityQuery) -> GridMaximum {
    let kernel = StabilityKernel::new(m);
    let mut out = GridMaximum { rho: 0.0, singular: 0 };
    for what in q.stiff_points() {
        match kernel.matrix(w, what).map_err(StabilityError::from).and_then(|mat| Ok(spectral_radius(&mat)?)) {
            Ok(r) => out.rho = out.rho.max(r),
            Err(_) => out.singular += 1,
        }
    }
    out
}

/// Membership test for one region, reusing the precomputed kernel.
#[derive(Debug, Clone)]
pub(crate) struct RegionTester {
    kernel: StabilityKernel,
    kind: RegionKind,
    stiff: Vec<Complex64>,
    /// Index of the grid point that most recently rejected a candidate;
    /// tried first since neighbouring candidates tend to fail there too.
    hint: usize,
}

impl RegionTester {
    pub(crate) fn new(m: &ImexGlmMethod, kind: RegionKind, q: &StabilityQuery) -> Self {
        let stiff = match kind {
            RegionKind::Constrained => q.stiff_points(),
            _ => vec![Complex64::new(0.0, 0.0)],
        };
        Self {
            kernel: StabilityKernel::new(m),
            kind,
            stiff,
            hint: 0,
        }
    }

    fn stable_at(&self, w: Complex64, what: Complex64) -> bool {
        let (w, what) = match self.kind {
            RegionKind::Implicit => (what, w),
            _ => (w, what),
        };
        match self.kernel.matrix(w, what) {
            Ok(mat) => is_schur_stable(&mat),
            // singular points count as unstable
            Err(_) => false,
        }
    }

    /// Whether `z` lies in the region (strict inequality `rho < 1`).
    pub(crate) fn contains(&mut self, z: Complex64) -> bool {
        let n = self.stiff.len();
        let start = self.hint.min(n - 1);
        for k in 0..n {
            let idx = (start + k) % n;
            if !self.stable_at(z, self.stiff[idx]) {
                self.hint = idx;
                return false;
            }
        }
        true
    }
}

/// Algorithm-1 bisection: largest `y` in `[lo, hi]` (within `tol`) for which
/// `inside(y)` holds, assuming `inside(lo)`. Returns the lower bracket.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut inside: impl FnMut(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intersection {
    pub y: f64,
    /// Set when `x + 0i` is outside the region; `y` is then 0.
    pub outside: bool,
}

/// Upper intersection of the vertical line `Re w = x` with the constrained
/// region, by bisection between 0 and `q.y_top`.
pub fn boundary_intersection(m: &ImexGlmMethod, x: f64, q: &StabilityQuery) -> Intersection {
    let mut tester = RegionTester::new(m, RegionKind::Constrained, q);
    line_intersection(&mut tester, x, q)
}

fn line_intersection(tester: &mut RegionTester, x: f64, q: &StabilityQuery) -> Intersection {
    if !tester.contains(Complex64::new(x, 0.0)) {
        return Intersection { y: 0.0, outside: true };
    }
    let y = bisect(0.0, q.y_top, q.tol, |y| tester.contains(Complex64::new(x, y)));
    Intersection { y, outside: false }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub kind: RegionKind,
    pub alpha: f64,
    /// Leftmost real-axis point of the region (for `Implicit`, the left end
    /// of the traced unstable interval).
    pub x_b: f64,
    /// Line abscissae and upper ordinates; the lower half is the mirror image.
    pub points: Vec<(f64, f64)>,
    /// Set when no nontrivial region was found.
    pub degenerate: bool,
}

impl RegionBoundary {
    /// Points mirrored into the lower half-plane, as `(x, y_upper, y_lower)`.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.points.iter().map(|&(x, y)| (x, y, -y)).collect()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

fn left_region(m: &ImexGlmMethod, kind: RegionKind, q: &StabilityQuery) -> RegionBoundary {
    let mut tester = RegionTester::new(m, kind, q);
    let x_b = -bisect(0.0, q.y_top, q.tol, |x| tester.contains(Complex64::new(-x, 0.0)));
    let degenerate = x_b >= -q.tol;
    let points = if degenerate {
        Vec::new()
    } else {
        linspace(x_b, 0.0, q.lines)
            .into_par_iter()
            .map_init(
                || tester.clone(),
                |t, x| (x, line_intersection(t, x, q).y),
            )
            .collect()
    };
    RegionBoundary {
        kind,
        alpha: q.alpha,
        x_b,
        points,
        degenerate,
    }
}

/// For the implicit component the region is the exterior of a bounded
/// unstable set in the right half-plane. Its real extent is located by a
/// scan refined with bisection, and each vertical line is bisected for the
/// top of the unstable set. Search windows start at `q.y_top` and double
/// (up to `1e4`) until they enclose the unstable set.
fn implicit_region(m: &ImexGlmMethod, q: &StabilityQuery) -> RegionBoundary {
    const LIMIT: f64 = 1e4;
    let mut tester = RegionTester::new(m, RegionKind::Implicit, q);
    let mut unstable = |x: f64, y: f64| !tester.contains(Complex64::new(x, y));
    let mut extent = q.y_top;
    while extent < LIMIT && unstable(extent, 0.0) {
        extent *= 2.0;
    }
    let scan = linspace(0.0, extent, 801);
    let first = scan.iter().position(|&x| x > 0.0 && unstable(x, 0.0));
    let Some(first) = first else {
        return RegionBoundary {
            kind: RegionKind::Implicit,
            alpha: q.alpha,
            x_b: 0.0,
            points: Vec::new(),
            degenerate: true,
        };
    };
    let last = (first..scan.len()).take_while(|&k| unstable(scan[k], 0.0)).last().unwrap_or(first);
    let fine = q.tol * 1e-3;
    let lo_edge = bisect(scan[first - 1], scan[first], fine, |x| !unstable(x, 0.0));
    let hi_edge = if last + 1 < scan.len() {
        // largest unstable x
        bisect(scan[last], scan[last + 1], fine, |x| unstable(x, 0.0))
    } else {
        scan[last]
    };
    let points = linspace(lo_edge, hi_edge, q.lines)
        .into_iter()
        .map(|x| {
            if !unstable(x, 0.0) {
                return (x, 0.0);
            }
            let mut top = q.y_top;
            while top < LIMIT && unstable(x, top) {
                top *= 2.0;
            }
            (x, bisect(0.0, top, q.tol, |y| unstable(x, y)))
        })
        .collect();
    RegionBoundary {
        kind: RegionKind::Implicit,
        alpha: q.alpha,
        x_b: lo_edge,
        points,
        degenerate: false,
    }
}

/// Boundary points of `S_alpha`, `S` or `Shat` for plotting.
pub fn region_boundary_points(m: &ImexGlmMethod, kind: RegionKind, q: &StabilityQuery) -> RegionBoundary {
    match kind {
        RegionKind::Implicit => implicit_region(m, q),
        _ => left_region(m, kind, q),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaReport {
    pub method: String,
    pub alpha: f64,
    pub x_b: f64,
    /// Trapezoidal area of the upper half.
    pub area_upper: f64,
    /// Twice the upper half by symmetry.
    pub area_total: f64,
    pub degenerate: bool,
    #[serde(skip)]
    pub boundary: RegionBoundary,
}

/// Area of the constrained region: `x_b` by bisection on the real axis,
/// `q.lines` vertical lines on `[x_b, 0]`, trapezoidal rule.
pub fn constrained_region_area(m: &ImexGlmMethod, q: &StabilityQuery) -> AreaReport {
    let boundary = left_region(m, RegionKind::Constrained, q);
    let upper = boundary
        .points
        .windows(2)
        .map(|p| 0.5 * (p[1].0 - p[0].0) * (p[0].1 + p[1].1))
        .sum::<f64>();
    AreaReport {
        method: m.name().to_string(),
        alpha: q.alpha,
        x_b: boundary.x_b,
        area_upper: upper,
        area_total: 2.0 * upper,
        degenerate: boundary.degenerate,
        boundary,
    }
}
