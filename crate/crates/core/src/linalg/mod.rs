//! Small linear-algebra layer: sparse storage for the PDE operators, banded
//! and dense direct factorizations of `I - gamma * J`, and eigenvalue helpers
//! for the small complex stability matrices.

mod banded;
mod charpoly;
mod eigen;
mod sparse;

pub use banded::BandedLu;
pub use charpoly::{characteristic_coefficients, is_schur_stable, roots_inside_unit_disk};
pub use eigen::{eigenvalues, spectral_radius};
pub use sparse::CsrMatrix;

use nalgebra::{DMatrix, Dyn, LU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),
}

/// Jacobian of the stiff term, either dense or sparse.
#[derive(Debug, Clone)]
pub enum StiffJacobian {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl StiffJacobian {
    pub fn dim(&self) -> usize {
        match self {
            StiffJacobian::Dense(m) => m.nrows(),
            StiffJacobian::Sparse(m) => m.nrows(),
        }
    }

    /// Factorizes `I - gamma * J`.
    pub fn factor_shifted(&self, gamma: f64) -> Result<Factorization, LinalgError> {
        match self {
            StiffJacobian::Dense(j) => {
                let n = j.nrows();
                let m = DMatrix::<f64>::identity(n, n) - j * gamma;
                let lu = m.lu();
                // nalgebra reports singularity only at solve time; check pivots now.
                let u = lu.u();
                for i in 0..n {
                    let p = u[(i, i)];
                    if p == 0.0 || !p.is_finite() {
                        return Err(LinalgError::Singular { row: i, pivot: p });
                    }
                }
                Ok(Factorization::Dense(lu))
            }
            StiffJacobian::Sparse(j) => {
                let shifted = j.identity_minus_scaled(gamma);
                Ok(Factorization::Banded(BandedLu::factor(&shifted)?))
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            StiffJacobian::Dense(m) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum();
                }
            }
            StiffJacobian::Sparse(m) => m.mul_vec(x, y),
        }
    }
}

/// A reusable direct factorization.
#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(LU<f64, Dyn, Dyn>),
    Banded(BandedLu),
}

impl Factorization {
    pub fn dim(&self) -> usize {
        match self {
            Factorization::Dense(lu) => lu.l().nrows(),
            Factorization::Banded(b) => b.dim(),
        }
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<(), LinalgError> {
        match self {
            Factorization::Dense(lu) => {
                let mut b = nalgebra::DVector::from_column_slice(rhs);
                if !lu.solve_mut(&mut b) {
                    return Err(LinalgError::Singular { row: 0, pivot: 0.0 });
                }
                rhs.copy_from_slice(b.as_slice());
                Ok(())
            }
            Factorization::Banded(b) => b.solve_in_place(rhs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_factorizations_agree() {
        let trip = vec![
            (0, 0, -2.0),
            (0, 1, 1.0),
            (1, 0, 1.0),
            (1, 1, -2.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 2, -2.0),
        ];
        let sparse = CsrMatrix::from_triplets(3, 3, &trip);
        let dense = StiffJacobian::Dense(sparse.to_dense());
        let sparse = StiffJacobian::Sparse(sparse);
        let fd = dense.factor_shifted(0.3).unwrap();
        let fs = sparse.factor_shifted(0.3).unwrap();
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = a.clone();
        fd.solve_in_place(&mut a).unwrap();
        fs.solve_in_place(&mut b).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_shift_is_reported() {
        let j = StiffJacobian::Dense(DMatrix::from_element(1, 1, 2.0));
        assert!(matches!(
            j.factor_shifted(0.5),
            Err(LinalgError::Singular { .. })
        ));
    }
}
