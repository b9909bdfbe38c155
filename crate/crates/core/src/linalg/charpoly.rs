use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients `c_0 = 1, c_1, ..., c_n` of `det(wI - M) = sum_k c_k w^(n-k)`
/// by the Faddeev-LeVerrier recursion.
pub fn characteristic_coefficients(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut aux = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        let prev = coeffs[k - 1];
        for i in 0..n {
            aux[(i, i)] += prev;
        }
        aux = m * aux;
        coeffs.push(-aux.trace() / k as f64);
    }
    coeffs
}

/// Schur-Cohn test: whether every root of `sum_k a_k z^k` (ascending
/// coefficients) lies strictly inside the unit disk.
pub fn roots_inside_unit_disk(ascending: &[Complex64]) -> bool {
    let mut f: Vec<Complex64> = ascending.to_vec();
    while f.len() > 1 && f.last().is_some_and(|c| c.norm() == 0.0) {
        f.pop();
    }
    while f.len() > 1 {
        let n = f.len() - 1;
        let (a0, an) = (f[0], f[n]);
        // reduced polynomial (conj(an) f - a0 f*) / z with f*_k = conj(a_{n-k});
        // its leading coefficient |an|^2 - |a0|^2 must stay positive
        if a0.norm_sqr() >= an.norm_sqr() {
            return false;
        }
        let mut next: Vec<Complex64> = (1..=n).map(|k| an.conj() * f[k] - a0 * f[n - k].conj()).collect();
        let scale = next.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if !(scale > 0.0) || !scale.is_finite() {
            return false;
        }
        for c in &mut next {
            *c /= scale;
        }
        f = next;
    }
    true
}

/// Whether the spectral radius of `m` is strictly below one.
pub fn is_schur_stable(m: &DMatrix<Complex64>) -> bool {
    let mut c = characteristic_coefficients(m);
    c.reverse();
    roots_inside_unit_disk(&c)
}
