use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::glm::{GlmTableau, ImexGlmMethod};

use super::StabilityError;

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Solves `lhs X = rhs`, rejecting numerically singular `lhs`.
fn solve(lhs: DMatrix<Complex64>, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, StabilityError> {
    let scale = lhs.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
    let lu = lhs.lu();
    let u = lu.u();
    let pivot = (0..u.nrows()).fold(f64::INFINITY, |m, i| m.min(u[(i, i)].norm()));
    if !(pivot > 1e-14 * scale) {
        return Err(StabilityError::Singular);
    }
    lu.solve(rhs).ok_or(StabilityError::Singular)
}

/// `M(z) = V + z B (I - z A)^{-1} U`.
pub fn glm_stability_matrix(t: &GlmTableau, z: Complex64) -> Result<DMatrix<Complex64>, StabilityError> {
    let s = t.stages();
    let lhs = DMatrix::<Complex64>::identity(s, s) - complexify(t.a()) * z;
    let k = solve(lhs, &complexify(t.u()))?;
    Ok(complexify(t.v()) + complexify(t.b()) * k * z)
}

/// `M(w, what) = V + (w B + what Bhat)(I - w A - what Ahat)^{-1} U`.
pub fn imex_stability_matrix(
    m: &ImexGlmMethod,
    w: Complex64,
    what: Complex64,
) -> Result<DMatrix<Complex64>, StabilityError> {
    StabilityKernel::new(m).matrix(w, what)
}

/// Precomputed complex copies of a method's coefficients for repeated
/// evaluation of the stability matrix.
#[derive(Debug, Clone)]
pub(crate) struct StabilityKernel {
    a: DMatrix<Complex64>,
    ahat: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
    bhat: DMatrix<Complex64>,
    u: DMatrix<Complex64>,
    v: DMatrix<Complex64>,
    lower: bool,
}

impl StabilityKernel {
    pub(crate) fn new(m: &ImexGlmMethod) -> Self {
        let (e, i) = (m.explicit(), m.implicit());
        let identity_u = {
            let u = e.u();
            u.nrows() == u.ncols() && (u - DMatrix::identity(u.nrows(), u.ncols())).amax() == 0.0
        };
        Self {
            a: complexify(e.a()),
            ahat: complexify(i.a()),
            b: complexify(e.b()),
            bhat: complexify(i.b()),
            u: complexify(e.u()),
            v: complexify(e.v()),
            lower: identity_u && e.is_lower_triangular() && i.is_lower_triangular(),
        }
    }

    pub(crate) fn matrix(&self, w: Complex64, what: Complex64) -> Result<DMatrix<Complex64>, StabilityError> {
        let s = self.a.nrows();
        let k = if self.lower {
            self.lower_inverse(w, what)?
        } else {
            let lhs = DMatrix::<Complex64>::identity(s, s) - &self.a * w - &self.ahat * what;
            solve(lhs, &self.u)?
        };
        Ok(&self.v + (&self.b * w + &self.bhat * what) * k)
    }

    /// `(I - w A - what Ahat)^{-1}` by forward substitution when both
    /// coefficient matrices are lower triangular and `U = I`.
    fn lower_inverse(&self, w: Complex64, what: Complex64) -> Result<DMatrix<Complex64>, StabilityError> {
        let s = self.a.nrows();
        let entry = |i: usize, j: usize| {
            let delta = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            delta - self.a[(i, j)] * w - self.ahat[(i, j)] * what
        };
        let scale = 1.0 + w.norm() + what.norm();
        let mut inv = DMatrix::<Complex64>::zeros(s, s);
        for i in 0..s {
            let d = entry(i, i);
            if !(d.norm() > 1e-14 * scale) {
                return Err(StabilityError::Singular);
            }
            for col in 0..=i {
                let mut acc = if i == col { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                for j in col..i {
                    acc -= entry(i, j) * inv[(j, col)];
                }
                inv[(i, col)] = acc / d;
            }
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glm::TableauKind;
    use crate::methods::{builtin_imex_dimsim4, builtin_imex_dimsim5, builtin_imex_euler};
    use nalgebra::DVector;

    fn backward_euler() -> GlmTableau {
        let one = DMatrix::from_element(1, 1, 1.0);
        GlmTableau::new(
            TableauKind::Implicit,
            1,
            1,
            one.clone(),
            one.clone(),
            one.clone(),
            one,
            DVector::from_element(1, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn backward_euler_matrix() {
        let t = backward_euler();
        let z = Complex64::new(-0.7, 0.4);
        let m = glm_stability_matrix(&t, z).unwrap();
        assert!((m[(0, 0)] - 1.0 / (1.0 - z)).norm() < 1e-15);
        assert!(matches!(
            glm_stability_matrix(&t, Complex64::new(1.0, 0.0)),
            Err(StabilityError::Singular)
        ));
        let zero = glm_stability_matrix(&t, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(zero[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn imex_euler_scalar_formula() {
        let m = builtin_imex_euler();
        for (w, wh) in [(-0.5, -3.0), (0.2, -0.1), (-1.0, -100.0)] {
            let (w, wh) = (Complex64::new(w, 0.3), Complex64::new(wh, -0.2));
            let got = imex_stability_matrix(&m, w, wh).unwrap()[(0, 0)];
            assert!((got - (1.0 + w) / (1.0 - wh)).norm() < 1e-14);
        }
    }

    #[test]
    fn triangular_path_matches_general_solve() {
        for m in [builtin_imex_dimsim4(), builtin_imex_dimsim5()] {
            let k = StabilityKernel::new(&m);
            assert!(k.lower);
            let w = Complex64::new(-0.4, 0.9);
            let wh = Complex64::new(-30.0, 12.0);
            let fast = k.matrix(w, wh).unwrap();
            let mut general = k.clone();
            general.lower = false;
            let slow = general.matrix(w, wh).unwrap();
            let scale = slow.iter().map(|z| z.norm()).fold(1.0, f64::max);
            assert!((fast - slow).iter().all(|z| z.norm() < 1e-13 * scale));
        }
    }

    #[test]
    fn reduces_to_components() {
        let m = builtin_imex_dimsim4();
        let z = Complex64::new(-1.3, 0.6);
        let zero = Complex64::new(0.0, 0.0);
        let e = imex_stability_matrix(&m, z, zero).unwrap() - glm_stability_matrix(m.explicit(), z).unwrap();
        let i = imex_stability_matrix(&m, zero, z).unwrap() - glm_stability_matrix(m.implicit(), z).unwrap();
        assert!(e.iter().chain(i.iter()).all(|x| x.norm() < 1e-13));
    }
}
