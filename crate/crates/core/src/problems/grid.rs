use crate::linalg::CsrMatrix;

use super::ProblemError;

/// Uniform grid on `[0, 1]^2` with `n` intervals per direction. Unknowns live
/// on the `(n - 1)^2` interior nodes, flattened row by row:
/// node `(i, j)` (x index `i`, y index `j`, both in `1..n`) has index
/// `(j - 1) (n - 1) + (i - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    n: usize,
}

impl Grid2D {
    pub fn new(n: usize) -> Result<Self, ProblemError> {
        if n < 4 {
            return Err(ProblemError::GridTooSmall(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Interior nodes per direction.
    pub fn side(&self) -> usize {
        self.n - 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.side() + (i - 1)
    }

    /// `(i, j)` of a flat index.
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.side() + 1, k / self.side() + 1)
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn sample(&self, mut f: impl FnMut(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (i, j) = self.node(k);
                f(self.coord(i), self.coord(j))
            })
            .collect()
    }

    /// Five-point Laplacian with homogeneous Dirichlet data.
    pub fn laplacian(&self) -> CsrMatrix {
        let m = self.side();
        let inv = 1.0 / (self.spacing() * self.spacing());
        let mut trip = Vec::with_capacity(5 * self.len());
        for j in 1..=m {
            for i in 1..=m {
                let k = self.index(i, j);
                trip.push((k, k, -4.0 * inv));
                if i > 1 {
                    trip.push((k, self.index(i - 1, j), inv));
                }
                if i < m {
                    trip.push((k, self.index(i + 1, j), inv));
                }
                if j > 1 {
                    trip.push((k, self.index(i, j - 1), inv));
                }
                if j < m {
                    trip.push((k, self.index(i, j + 1), inv));
                }
            }
        }
        CsrMatrix::from_triplets(self.len(), self.len(), &trip)
    }

    /// Adds the boundary part of the five-point Laplacian,
    /// `boundary(x, y) / dx^2` for each boundary neighbour, to `out`.
    pub fn add_boundary_laplacian(&self, scale: f64, out: &mut [f64], boundary: impl Fn(f64, f64) -> f64) {
        let m = self.side();
        let w = scale / (self.spacing() * self.spacing());
        let edge = |i: usize| self.coord(i);
        for t in 1..=m {
            // left (x = 0) and right (x = 1) columns
            out[self.index(1, t)] += w * boundary(0.0, edge(t));
            out[self.index(m, t)] += w * boundary(1.0, edge(t));
            // bottom (y = 0) and top (y = 1) rows
            out[self.index(t, 1)] += w * boundary(edge(t), 0.0);
            out[self.index(t, m)] += w * boundary(edge(t), 1.0);
        }
    }
}
