use nalgebra::DMatrix;
use num_complex::Complex64;

use super::LinalgError;

/// Eigenvalues of a small dense complex matrix via the complex Schur form.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>, LinalgError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(LinalgError::Dimension {
            expected: n,
            found: m.ncols(),
        });
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        2 => {
            // closed form avoids the iteration for the common 2x2 case
            let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            return Ok(vec![half_tr + disc, half_tr - disc]);
        }
        _ => {}
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(LinalgError::NoConvergence(n))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Largest eigenvalue magnitude.
pub fn spectral_radius(m: &DMatrix<Complex64>) -> Result<f64, LinalgError> {
    Ok(eigenvalues(m)?
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_radius() {
        let m = DMatrix::<Complex64>::identity(3, 3);
        assert!((spectral_radius(&m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_radius() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.25, 0.0),
        ]));
        assert!((spectral_radius(&m).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangular_eigenvalues_are_diagonal() {
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = Complex64::new(i as f64, -(i as f64));
            for j in i + 1..4 {
                m[(i, j)] = Complex64::new(1.0, 2.0);
            }
        }
        let mut ev: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (i, e) in ev.iter().enumerate() {
            assert!((e - i as f64).abs() < 1e-12);
        }
    }
}
