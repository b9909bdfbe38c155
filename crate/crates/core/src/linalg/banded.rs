use super::{CsrMatrix, LinalgError};

/// LU factorization of a banded matrix without pivoting.
///
/// Intended for the diagonally dominant `I - gamma * L` systems coming from
/// five-point diffusion stencils, where no pivoting is needed. Rows are stored
/// as dense windows of width `lower + upper + 1`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    band: Vec<f64>,
}

impl BandedLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self, LinalgError> {
        if m.nrows() != m.ncols() {
            return Err(LinalgError::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let (lower, upper) = m.bandwidths();
        let width = lower + upper + 1;
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in m.row(i) {
                band[i * width + j + lower - i] = v;
            }
        }
        let scale = band.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tiny = scale * f64::EPSILON * n as f64;
        for k in 0..n {
            let pivot = band[k * width + lower];
            if pivot.abs() <= tiny || !pivot.is_finite() {
                return Err(LinalgError::Singular { row: k, pivot });
            }
            let last_row = (k + lower).min(n - 1);
            let last_col = (k + upper).min(n - 1);
            for i in k + 1..=last_row {
                let ik = i * width + k + lower - i;
                let l = band[ik] / pivot;
                band[ik] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    band[i * width + j + lower - i] -= l * band[k * width + j + lower - k];
                }
            }
        }
        Ok(Self {
            n,
            lower,
            upper,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::Dimension {
                expected: self.n,
                found: b.len(),
            });
        }
        let width = self.lower + self.upper + 1;
        for i in 0..self.n {
            let row = &self.band[i * width..(i + 1) * width];
            let mut acc = b[i];
            for j in i.saturating_sub(self.lower)..i {
                acc -= row[j + self.lower - i] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..self.n).rev() {
            let row = &self.band[i * width..(i + 1) * width];
            let mut acc = b[i];
            for j in i + 1..=(i + self.upper).min(self.n - 1) {
                acc -= row[j + self.lower - i] * b[j];
            }
            b[i] = acc / row[self.lower];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_banded(n: usize, lower: usize, upper: usize, vals: &[f64]) -> CsrMatrix {
        let mut trip = Vec::new();
        let mut k = 0;
        for i in 0..n {
            let lo = i.saturating_sub(lower);
            let hi = (i + upper).min(n - 1);
            let mut off = 0.0;
            for j in lo..=hi {
                if j != i {
                    let v = vals[k % vals.len()];
                    k += 1;
                    off += v.abs();
                    trip.push((i, j, v));
                }
            }
            trip.push((i, i, off + 1.0));
        }
        CsrMatrix::from_triplets(n, n, &trip)
    }

    proptest! {
        #[test]
        fn solves_diagonally_dominant_systems(
            n in 2usize..30,
            lower in 0usize..4,
            upper in 0usize..4,
            vals in proptest::collection::vec(-1.0f64..1.0, 1..40),
            rhs_seed in proptest::collection::vec(-5.0f64..5.0, 30),
        ) {
            let m = random_banded(n, lower, upper, &vals);
            let lu = BandedLu::factor(&m).unwrap();
            let x_true: Vec<f64> = rhs_seed[..n].to_vec();
            let mut b = vec![0.0; n];
            m.mul_vec(&x_true, &mut b);
            lu.solve_in_place(&mut b).unwrap();
            for (x, y) in b.iter().zip(&x_true) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_pivot_is_singular() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        assert!(matches!(BandedLu::factor(&m), Err(LinalgError::Singular { row: 0, .. })));
    }
}
