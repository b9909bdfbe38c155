use nalgebra::{DMatrix, DVector};

use super::{rank_one_v, GlmError};

/// Values and integrals of the nodal polynomials
/// `phi_j(x) = prod_{k != j} (x - c_k)` needed by the DIMSIM order conditions.
///
/// Matrix entries are indexed `(i, j)`: row `i` is the evaluation point
/// (`1 + c_i` or `c_i`), column `j` the polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalTable {
    /// Monomial coefficients of each `phi_j`, lowest degree first.
    pub coefficients: Vec<Vec<f64>>,
    /// `phi_j(c_j)`
    pub at_node: Vec<f64>,
    /// `phi_j(1 + c_i)`
    pub at_shifted: DMatrix<f64>,
    /// `int_0^{1 + c_i} phi_j`
    pub integral_shifted: DMatrix<f64>,
    /// `int_0^{c_i} phi_j`
    pub integral_node: DMatrix<f64>,
}

pub(crate) fn check_distinct(c: &DVector<f64>) -> Result<(), GlmError> {
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            if c[i] == c[j] {
                return Err(GlmError::DistinctNodes { i, j, value: c[i] });
            }
        }
    }
    Ok(())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `int_0^x p`, evaluated from the term-wise antiderivative.
fn integral_from_zero(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, &a)| acc * x + a / (k + 1) as f64)
        * x
}

pub fn nodal_polynomials(c: &DVector<f64>) -> Result<NodalTable, GlmError> {
    check_distinct(c)?;
    let s = c.len();
    let coefficients: Vec<Vec<f64>> = (0..s)
        .map(|j| {
            let mut poly = vec![1.0];
            for (k, &ck) in c.iter().enumerate() {
                if k == j {
                    continue;
                }
                // poly *= (x - ck)
                let mut next = vec![0.0; poly.len() + 1];
                for (d, &p) in poly.iter().enumerate() {
                    next[d + 1] += p;
                    next[d] -= ck * p;
                }
                poly = next;
            }
            poly
        })
        .collect();
    let at_node = (0..s).map(|j| horner(&coefficients[j], c[j])).collect();
    let at_shifted = DMatrix::from_fn(s, s, |i, j| horner(&coefficients[j], 1.0 + c[i]));
    let integral_shifted =
        DMatrix::from_fn(s, s, |i, j| integral_from_zero(&coefficients[j], 1.0 + c[i]));
    let integral_node = DMatrix::from_fn(s, s, |i, j| integral_from_zero(&coefficients[j], c[i]));
    Ok(NodalTable {
        coefficients,
        at_node,
        at_shifted,
        integral_shifted,
        integral_node,
    })
}

/// `B = B0 - A B1 - V B2 + V A` for DIMSIMs with `p = q = r = s`,
/// `U = I` and `V = 1 v^T`.
pub fn dimsim_b_matrix(
    a: &DMatrix<f64>,
    c: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DMatrix<f64>, GlmError> {
    let s = c.len();
    super::check_shape("A", a, s, s)?;
    if v.len() != s {
        return Err(GlmError::shape("v", s, v.len()));
    }
    let t = nodal_polynomials(c)?;
    let b0 = DMatrix::from_fn(s, s, |i, j| t.integral_shifted[(i, j)] / t.at_node[j]);
    let b1 = DMatrix::from_fn(s, s, |i, j| t.at_shifted[(i, j)] / t.at_node[j]);
    let b2 = DMatrix::from_fn(s, s, |i, j| t.integral_node[(i, j)] / t.at_node[j]);
    let vm = rank_one_v(v);
    Ok(&b0 - a * &b1 - &vm * &b2 + &vm * a)
}

/// Starting weights, column-wise: `q_0 = 1`, `q_k = c^k/k! - A c^{k-1}/(k-1)!`.
pub fn starting_weight_matrix(a: &DMatrix<f64>, c: &DVector<f64>, p: usize) -> DMatrix<f64> {
    let s = c.len();
    let mut q = DMatrix::zeros(s, p + 1);
    q.column_mut(0).fill(1.0);
    let mut fact_prev = 1.0; // (k-1)!
    for k in 1..=p {
        let fact = fact_prev * k as f64;
        let ck = c.map(|x| x.powi(k as i32) / fact);
        let ck1 = c.map(|x| x.powi(k as i32 - 1) / fact_prev);
        let col = ck - a * ck1;
        q.column_mut(k).copy_from(&col);
        fact_prev = fact;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Product-form evaluation and composite Gauss-Legendre quadrature, both
    /// independent of the monomial expansion under test.
    fn phi_direct(c: &[f64], j: usize, x: f64) -> f64 {
        c.iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &ck)| x - ck)
            .product()
    }

    fn quad(c: &[f64], j: usize, upper: f64) -> f64 {
        // 5-point Gauss-Legendre on 64 panels (exact for degree <= 9 per panel)
        let nodes = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let panels = 64;
        let hw = upper / panels as f64 / 2.0;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = (2 * p + 1) as f64 * hw;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += w * hw * phi_direct(c, j, mid + x * hw);
            }
        }
        acc
    }

    #[test]
    fn single_node_is_empty_product() {
        let t = nodal_polynomials(&DVector::from_vec(vec![0.0])).unwrap();
        assert_eq!(t.coefficients, vec![vec![1.0]]);
        assert_eq!(t.at_node, vec![1.0]);
        assert_eq!(t.integral_shifted[(0, 0)], 1.0);
    }

    #[test]
    fn two_point_lagrange() {
        let t = nodal_polynomials(&DVector::from_vec(vec![0.0, 1.0])).unwrap();
        assert_eq!(t.coefficients[0], vec![-1.0, 1.0]);
        assert_eq!(t.coefficients[1], vec![0.0, 1.0]);
        assert_eq!(t.at_node, vec![-1.0, 1.0]);
    }

    #[test]
    fn cubic_nodes_match_product_form() {
        let c = vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let t = nodal_polynomials(&DVector::from_vec(c.clone())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            for j in 0..4 {
                assert!((horner(&t.coefficients[j], x) - phi_direct(&c, j, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn integrals_match_quadrature_for_random_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in 1..=6 {
            for _ in 0..5 {
                let c: Vec<f64> = (0..s).map(|_| rng.gen_range(0.0..1.0)).collect();
                let t = nodal_polynomials(&DVector::from_vec(c.clone())).unwrap();
                for i in 0..s {
                    for j in 0..s {
                        let q1 = quad(&c, j, 1.0 + c[i]);
                        let q0 = quad(&c, j, c[i]);
                        assert!((t.integral_shifted[(i, j)] - q1).abs() < 1e-12);
                        assert!((t.integral_node[(i, j)] - q0).abs() < 1e-12);
                        assert!((t.at_shifted[(i, j)] - phi_direct(&c, j, 1.0 + c[i])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let err = nodal_polynomials(&DVector::from_vec(vec![0.0, 0.5, 0.5])).unwrap_err();
        assert!(matches!(err, GlmError::DistinctNodes { i: 1, j: 2, .. }));
    }

    #[test]
    fn one_stage_b_matrices() {
        let c = DVector::from_vec(vec![0.0]);
        let v = DVector::from_vec(vec![1.0]);
        let fe = dimsim_b_matrix(&DMatrix::from_element(1, 1, 0.0), &c, &v).unwrap();
        let be = dimsim_b_matrix(&DMatrix::from_element(1, 1, 1.0), &c, &v).unwrap();
        assert_eq!(fe[(0, 0)], 1.0);
        assert_eq!(be[(0, 0)], 1.0);
    }

    #[test]
    fn zero_a_gives_scaled_powers() {
        let c = DVector::from_vec(vec![0.0, 0.4, 1.0]);
        let q = starting_weight_matrix(&DMatrix::zeros(3, 3), &c, 3);
        for i in 0..3 {
            assert_eq!(q[(i, 0)], 1.0);
            assert!((q[(i, 1)] - c[i]).abs() < 1e-15);
            assert!((q[(i, 2)] - c[i] * c[i] / 2.0).abs() < 1e-15);
            assert!((q[(i, 3)] - c[i].powi(3) / 6.0).abs() < 1e-15);
        }
    }
}
