//! Seeded samplers for the randomized checks. All draws go through
//! `ChaCha8Rng` so a seed reproduces the same matrices on every platform.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::DensityMatrix;
use crate::eigen::herm_eig;
use crate::expm::expm;
use crate::matrix::CMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let data = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    CMatrix::from_array_unchecked(data)
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    gaussian_matrix(n, rng).hermitian_part()
}

/// Random Hermitian matrix rescaled to spectral norm `norm`.
pub fn hermitian_with_norm<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> CMatrix {
    let h = hermitian(n, rng);
    let spec = herm_eig(&h).expect("hermitian part is Hermitian");
    let radius = spec.min_eigenvalue().abs().max(spec.max_eigenvalue().abs());
    if radius == 0.0 {
        return h;
    }
    h.scale_real(norm / radius)
}

/// `e^{iH}` for a random Hermitian `H`.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let h = hermitian_with_norm(n, std::f64::consts::PI, rng);
    expm(&h.scale(Complex64::new(0.0, 1.0)))
}

/// `G Gᴴ / tr(G Gᴴ)`; full rank with probability one.
pub fn density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(n, rng);
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Wishart sample is a density")
}

/// Faithful density with spectrum drawn uniformly from `[floor, 1]` before
/// normalization, in a random eigenbasis.
pub fn faithful_density<R: Rng + ?Sized>(n: usize, floor: f64, rng: &mut R) -> DensityMatrix {
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(floor..=1.0)).collect();
    let total: f64 = weights.iter().sum();
    let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let u = unitary(n, rng);
    let m = u.matmul(&CMatrix::from_diag(&p)).matmul(&u.adjoint()).hermitian_part();
    // renormalize away the rounding in the conjugation
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).expect("rotated diagonal density")
}

/// Positive definite `e^H` with `‖H‖₂ ≤ max_norm`.
pub fn positive_definite<R: Rng + ?Sized>(n: usize, max_norm: f64, rng: &mut R) -> CMatrix {
    let norm = rng.random_range(0.0..=max_norm);
    expm(&hermitian_with_norm(n, norm, rng)).hermitian_part()
}

pub fn probability_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}
