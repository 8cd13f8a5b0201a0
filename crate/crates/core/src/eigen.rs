//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral matrix functions built on it.

use std::cmp::Ordering;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ZERO};

/// Relative Hermiticity tolerance for inputs to [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius mass (relative) at which Jacobi sweeps stop.
pub const SWEEP_THRESHOLD: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to the spectral scale) are a degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Negative eigenvalues above `-PSD_TOL` are clamped to zero by [`sqrt_psd`].
pub const PSD_TOL: f64 = 1e-10;

/// `m = V diag(λ) Vᴴ` with eigenvalues ascending and orthonormal columns of `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    /// Set when two eigenvalues coincide within [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_j f(λ_j) |v_j⟩⟨v_j|`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let n = self.dim();
        let v = self.eigenvectors.as_array();
        let mut scaled = v.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            scaled.column_mut(j).mapv_inplace(|z| z * fj);
        }
        let vh = v.t().mapv(|z| z.conj());
        CMatrix::from_array_unchecked(scaled.dot(&vh))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is phased so that its
/// first non-negligible component is real and positive, and inside a cluster
/// of equal eigenvalues the columns are ordered by descending lexicographic
/// comparison of component magnitudes (so the identity keeps its natural
/// column order).
pub fn herm_eig(m: &CMatrix) -> Result<SpectralDecomposition> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim();
    let mut a = m.hermitian_part().into_array();
    for i in 0..n {
        a[[i, i]].im = 0.0;
    }
    let mut v: Array2<Complex64> = Array2::eye(n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    if scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= SWEEP_THRESHOLD * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > SWEEP_THRESHOLD * scale {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    Ok(canonicalize(raw, v))
}

fn off_diagonal_norm(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[[i, j]].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p, q]`. The rotation is
/// `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the `(p, q)` plane, where
/// `a[p, q] = r e^{iφ}`; the update is `a ← Jᴴ a J`, `v ← v J`.
fn rotate(a: &mut Array2<Complex64>, v: &mut Array2<Complex64>, p: usize, q: usize, scale: f64) {
    let apq = a[[p, q]];
    let r = apq.norm();
    if r <= f64::EPSILON * 1e-3 * scale {
        a[[p, q]] = ZERO;
        a[[q, p]] = ZERO;
        return;
    }
    let phase = apq / r;
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -pc * s;
    let j_qq = pc * c;

    let n = a.nrows();
    // a ← a J
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = akp * j_pp + akq * j_qp;
        a[[k, q]] = akp * j_pq + akq * j_qq;
    }
    // a ← Jᴴ a
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[[q, k]] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[[p, q]] = ZERO;
    a[[q, p]] = ZERO;
    a[[p, p]].im = 0.0;
    a[[q, q]].im = 0.0;
    // v ← v J
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = vkp * j_pp + vkq * j_qp;
        v[[k, q]] = vkp * j_pq + vkq * j_qq;
    }
}

const PHASE_TOL: f64 = 1e-12;

fn canonicalize(raw: Vec<f64>, v: Array2<Complex64>) -> SpectralDecomposition {
    let n = raw.len();
    let mut columns: Vec<Vec<Complex64>> = (0..n).map(|j| v.column(j).to_vec()).collect();
    for col in columns.iter_mut() {
        if let Some(lead) = col.iter().find(|z| z.norm() > PHASE_TOL).copied() {
            let fix = lead.conj() / lead.norm();
            for z in col.iter_mut() {
                *z *= fix;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));

    let spread = raw.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    let tie = DEGENERACY_TOL * spread;
    let mut degenerate = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && raw[order[end]] - raw[order[end - 1]] <= tie {
            end += 1;
        }
        if end - start > 1 {
            degenerate = true;
            order[start..end].sort_by(|&i, &j| compare_magnitudes(&columns[i], &columns[j]));
        }
        start = end;
    }

    let mut vecs = Array2::zeros((n, n));
    let mut eigenvalues = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(raw[src]);
        for k in 0..n {
            vecs[[k, dst]] = columns[src][k];
        }
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: CMatrix::from_array_unchecked(vecs),
        degenerate,
    }
}

/// Larger leading magnitudes sort first.
fn compare_magnitudes(u: &[Complex64], v: &[Complex64]) -> Ordering {
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a.norm(), b.norm());
        if a > b + PHASE_TOL {
            return Ordering::Less;
        }
        if b > a + PHASE_TOL {
            return Ordering::Greater;
        }
    }
    Ordering::Equal
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let spec = herm_eig(m)?;
    let min = spec.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(spec.map(|x| x.max(0.0).sqrt()))
}

/// Inverse of a Hermitian positive definite matrix, together with its spectrum.
pub fn inverse_pd(m: &CMatrix, threshold: f64) -> Result<(CMatrix, SpectralDecomposition)> {
    let spec = herm_eig(m)?;
    let min = spec.min_eigenvalue();
    if min <= threshold {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok((spec.map(|x| 1.0 / x), spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorts_and_permutes_identity() {
        let m = CMatrix::from_diag(&[0.5, 1.0 / 3.0, 1.0 / 6.0]);
        let s = herm_eig(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0 / 6.0, 1.0 / 3.0, 0.5]);
        let expected = CMatrix::from_real_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(s.eigenvectors, expected);
        assert!(!s.degenerate);
    }

    #[test]
    fn complex_sigma_spectrum() {
        let m = CMatrix::from_row_major(
            3,
            vec![
                c(0.25, 0.0),
                ZERO,
                c(0.0, 0.125),
                ZERO,
                c(0.5, 0.0),
                ZERO,
                c(0.0, -0.125),
                ZERO,
                c(0.25, 0.0),
            ],
        )
        .unwrap();
        let s = herm_eig(&m).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([0.125, 0.375, 0.5]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        assert!(s.reconstruct().distance(&m) < 1e-14);
    }

    #[test]
    fn pauli_x() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = herm_eig(&m).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        // leading components real and positive
        for j in 0..2 {
            let lead = s.eigenvectors.get(0, j);
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn identity_is_degenerate_and_keeps_column_order() {
        let s = herm_eig(&CMatrix::identity(4).scale_real(0.25)).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.eigenvectors, CMatrix::identity(4));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match herm_eig(&m) {
            Err(Error::NotHermitian { deviation }) => assert!(deviation > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_matrix() {
        let s = herm_eig(&CMatrix::zeros(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
        assert_eq!(s.eigenvectors, CMatrix::identity(3));
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        assert_eq!(sqrt_psd(&CMatrix::identity(3)).unwrap(), CMatrix::identity(3));
        let r = sqrt_psd(&CMatrix::from_diag(&[4.0, 9.0])).unwrap();
        assert!(r.distance(&CMatrix::from_diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let m = CMatrix::from_diag(&[1.0, -1e-6]);
        assert!(matches!(sqrt_psd(&m), Err(Error::NotPsd { .. })));
        // tiny negative noise is clamped
        let m = CMatrix::from_diag(&[1.0, -1e-13]);
        let r = sqrt_psd(&m).unwrap();
        assert_eq!(r.get(1, 1), ZERO);
    }
}
