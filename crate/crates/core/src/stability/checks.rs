use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::glm::GlmTableau;
use crate::linalg::{characteristic_coefficients, eigenvalues};

use super::{glm_stability_matrix, StabilityError};

const IMAG_TOL: f64 = 1e-12;
const LIMIT_TOL: f64 = 1e-5;
const IRKS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct LStabilityReport {
    /// Largest spectral radius on the sampled imaginary axis.
    pub max_rho_imaginary: f64,
    /// Largest spectral radius at the random left half-plane samples.
    pub max_rho_left: f64,
    /// `rho(M(-10^k))` for `k = 2..=8`.
    pub rho_limit: Vec<f64>,
    pub singular_points: usize,
    pub bounded: bool,
    pub decaying: bool,
}

impl LStabilityReport {
    pub fn passed(&self) -> bool {
        self.bounded && self.decaying
    }
}

fn rho_at(t: &GlmTableau, z: Complex64) -> Result<f64, StabilityError> {
    let m = glm_stability_matrix(t, z)?;
    Ok(crate::linalg::spectral_radius(&m)?)
}

/// Samples `rho(M(z))` on the imaginary axis (`|y| = 10^-2..10^4`), at 200
/// seeded random points of the left half-plane and along `z = -10^k`.
pub fn check_l_stability(t: &GlmTableau) -> LStabilityReport {
    let mut singular = 0;
    let mut sample = |z: Complex64| match rho_at(t, z) {
        Ok(r) => r,
        Err(_) => {
            singular += 1;
            f64::INFINITY
        }
    };
    let mut max_imag = 0.0f64;
    for k in -2..=4 {
        let y = 10f64.powi(k);
        for sign in [1.0, -1.0] {
            max_imag = max_imag.max(sample(Complex64::new(0.0, sign * y)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x15AB);
    let mut max_left = 0.0f64;
    for _ in 0..200 {
        let mag = 10f64.powf(rng.gen_range(-3.0..4.0));
        let angle = rng.gen_range(std::f64::consts::FRAC_PI_2..3.0 * std::f64::consts::FRAC_PI_2);
        max_left = max_left.max(sample(Complex64::from_polar(mag, angle)));
    }
    let rho_limit: Vec<f64> = (2..=8).map(|k| sample(Complex64::new(-(10f64.powi(k)), 0.0))).collect();
    let decaying = rho_limit.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15)
        && rho_limit.last().is_some_and(|&r| r < LIMIT_TOL);
    LStabilityReport {
        max_rho_imaginary: max_imag,
        max_rho_left: max_left,
        rho_limit,
        singular_points: singular,
        bounded: max_imag <= 1.0 + IMAG_TOL && max_left <= 1.0 + IMAG_TOL,
        decaying,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IrksSample {
    pub z_re: f64,
    pub z_im: f64,
    /// Eigenvalue magnitudes of `M(z)`, ascending.
    pub magnitudes: Vec<f64>,
    /// Empirical stability function: the dominant eigenvalue.
    pub r_re: f64,
    pub r_im: f64,
    /// Largest `|e_k|`, `k = 2..s`, among the elementary symmetric functions
    /// of the eigenvalues, i.e. the coefficients of the characteristic
    /// polynomial that vanish for `w^(s-1) (w - R(z))`.
    pub charpoly_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrksReport {
    pub samples: Vec<IrksSample>,
    pub singular_points: usize,
}

impl IrksReport {
    pub fn passed(&self) -> bool {
        self.singular_points == 0 && self.samples.iter().all(|s| s.passed)
    }

    /// Largest of the `s - 1` small magnitudes over all samples.
    pub fn worst_small_magnitude(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.magnitudes[..s.magnitudes.len() - 1].iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn worst_charpoly_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.charpoly_residual).fold(0.0, f64::max)
    }
}

/// Checks that `M(z)` has `s - 1` vanishing eigenvalues at each sample.
pub fn check_irks(t: &GlmTableau, samples: &[Complex64]) -> IrksReport {
    let mut out = Vec::with_capacity(samples.len());
    let mut singular = 0;
    for &z in samples {
        let m = match glm_stability_matrix(t, z) {
            Ok(m) => m,
            Err(_) => {
                singular += 1;
                continue;
            }
        };
        let Ok(mut eig) = eigenvalues(&m) else {
            singular += 1;
            continue;
        };
        eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        let magnitudes: Vec<f64> = eig.iter().map(|e| e.norm()).collect();
        let dominant = *eig.last().expect("non-empty");
        let coeffs = characteristic_coefficients(&m);
        let residual = coeffs.iter().skip(2).map(|c| c.norm()).fold(0.0, f64::max);
        let small = &magnitudes[..magnitudes.len() - 1];
        out.push(IrksSample {
            z_re: z.re,
            z_im: z.im,
            passed: small.iter().all(|&x| x < IRKS_TOL),
            magnitudes,
            r_re: dominant.re,
            r_im: dominant.im,
            charpoly_residual: residual,
        });
    }
    IrksReport {
        samples: out,
        singular_points: singular,
    }
}

/// `count` seeded points in the open left half-plane with moduli
/// log-uniform in `[0.1, 10]`.
pub fn left_half_plane_samples(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mag = 10f64.powf(rng.gen_range(-1.0..1.0));
            let angle = rng.gen_range(0.51 * std::f64::consts::PI..1.49 * std::f64::consts::PI);
            Complex64::from_polar(mag, angle)
        })
        .collect()
}
