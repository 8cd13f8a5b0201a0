//! Detailed-balance Lindblad generators.
//!
//! For a faithful density `σ = Σ_j e^{-λ_j} |η_j⟩⟨η_j|` the generator is
//!
//! ```text
//! ℒ(A)  = Σ_{i,j} e^{-w_ij/2} ( V_ijᴴ [A, V_ij] + [V_ijᴴ, A] V_ij )
//! ℒ†(ρ) = Σ_{i,j} e^{-w_ij/2} ( [V_ij ρ, V_ijᴴ] + [V_ij, ρ V_ijᴴ] )
//! ```
//!
//! with jump operators `V_ij = |η_i⟩⟨η_j|` and weights `w_ij = λ_i − λ_j`.
//! The generator is kept in spectral form. In the η frame both actions reduce
//! to a diagonal exchange term plus a Hadamard scaling of the off-diagonal
//! entries, so applying ℒ costs two basis changes and `O(n²)` work. The dense
//! `n² x n²` superoperator is only built when an exponential is needed.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::DensityMatrix;
use crate::eigen::herm_eig;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::matrix::{CMatrix, MatrixJson};
use crate::random;

/// `Σ_j e^{-λ_j}` must equal one to this precision.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Consistency tolerance between a supplied eigenbasis and `σ`.
pub const EIGENPAIR_TOL: f64 = 1e-10;
/// Default pass threshold for [`DbcGenerator::check_dbc`].
pub const DBC_TOL: f64 = 1e-9;
/// Trace and positivity slack for [`DbcGenerator::evolve_density`].
pub const EVOLUTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DbcGenerator {
    sigma: DensityMatrix,
    lambdas: Vec<f64>,
    etas: CMatrix,
    weights: Array2<f64>,
    /// `e^{-w_ij/2}`
    rates: Array2<f64>,
    degenerate: bool,
}

/// The generator of the heat semigroup: `σ = I/n` with the matrix units as jumps.
pub fn build_l0(n: usize) -> Result<DbcGenerator> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension must be at least 2, got {n}")));
    }
    let sigma = DensityMatrix::maximally_mixed(n);
    let lambdas = vec![(n as f64).ln(); n];
    Ok(DbcGenerator::assemble(sigma, lambdas, CMatrix::identity(n), true))
}

/// The σ-detailed-balance generator for a faithful `σ`.
pub fn build_dbc_generator(sigma: &DensityMatrix) -> Result<DbcGenerator> {
    sigma.ensure_faithful()?;
    let spec = sigma.spectrum();
    let lambdas = spec.eigenvalues.iter().map(|&p| -p.ln()).collect();
    Ok(DbcGenerator::assemble(
        sigma.clone(),
        lambdas,
        spec.eigenvectors.clone(),
        spec.degenerate,
    ))
}

impl DbcGenerator {
    fn assemble(sigma: DensityMatrix, lambdas: Vec<f64>, etas: CMatrix, degenerate: bool) -> Self {
        let n = lambdas.len();
        let weights = Array2::from_shape_fn((n, n), |(i, j)| lambdas[i] - lambdas[j]);
        let rates = weights.mapv(|w| (-w / 2.0).exp());
        Self {
            sigma,
            lambdas,
            etas,
            weights,
            rates,
            degenerate,
        }
    }

    /// Rebuilds a generator from stored spectral data, checking that
    /// `σ η_j = e^{-λ_j} η_j`, that the η are orthonormal and that
    /// `Σ_j e^{-λ_j} = 1`.
    pub fn from_parts(sigma: DensityMatrix, lambdas: Vec<f64>, etas: CMatrix) -> Result<Self> {
        let n = sigma.dim();
        if lambdas.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: lambdas.len(),
            });
        }
        sigma.matrix().ensure_same_dim(&etas)?;
        sigma.ensure_faithful()?;
        let total: f64 = lambdas.iter().map(|l| (-l).exp()).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Invalid(format!(
                "sum of exp(-lambda) is {total}, expected 1"
            )));
        }
        let gram = etas.adjoint().matmul(&etas);
        if gram.distance(&CMatrix::identity(n)) > EIGENPAIR_TOL {
            return Err(Error::Invalid("etas are not orthonormal".into()));
        }
        let rebuilt = etas
            .matmul(&CMatrix::from_diag(
                &lambdas.iter().map(|l| (-l).exp()).collect::<Vec<_>>(),
            ))
            .matmul(&etas.adjoint());
        if rebuilt.distance(sigma.matrix()) > EIGENPAIR_TOL {
            return Err(Error::Invalid(
                "lambdas/etas do not diagonalize sigma".into(),
            ));
        }
        let degenerate = sigma.spectrum().degenerate;
        Ok(Self::assemble(sigma, lambdas, etas, degenerate))
    }

    /// A copy with the single weight `w_ij` replaced. The result no longer
    /// satisfies detailed balance in general; it exists as a negative control
    /// for [`DbcGenerator::check_dbc`].
    pub fn with_weight(&self, i: usize, j: usize, w: f64) -> Self {
        let mut out = self.clone();
        out.weights[[i, j]] = w;
        out.rates[[i, j]] = (-w / 2.0).exp();
        out
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Orthonormal eigenbasis of `σ`, one η per column.
    pub fn etas(&self) -> &CMatrix {
        &self.etas
    }

    pub fn eta(&self, j: usize) -> Array1<Complex64> {
        self.etas.column(j)
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn rates(&self) -> &Array2<f64> {
        &self.rates
    }

    /// True when `σ` has a repeated eigenvalue, in which case the η basis is
    /// not unique (the generator itself still is).
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// `V_ij = |η_i⟩⟨η_j|`.
    pub fn jump(&self, i: usize, j: usize) -> CMatrix {
        CMatrix::outer(&self.eta(i), &self.eta(j))
    }

    /// `σ` weights `e^{-λ_j}` in η order.
    pub fn sigma_weights(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| (-l).exp()).collect()
    }

    fn to_frame(&self, a: &CMatrix) -> CMatrix {
        self.etas.adjoint().matmul(a).matmul(&self.etas)
    }

    fn out_of_frame(&self, a: &CMatrix) -> CMatrix {
        self.etas.matmul(a).matmul(&self.etas.adjoint())
    }

    /// `s_j = Σ_i e^{-w_ij/2}`
    fn column_sums(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.rates[[i, j]]).sum())
            .collect()
    }

    fn check_dim(&self, a: &CMatrix) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// Heisenberg action `ℒ(A)`.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        Ok(self.out_of_frame(&self.frame_action(&self.to_frame(a), false)))
    }

    /// Schrödinger action `ℒ†(ρ)`.
    pub fn apply_dual(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_dim(rho)?;
        Ok(self.out_of_frame(&self.frame_action(&self.to_frame(rho), true)))
    }

    /// In the η frame:
    /// `ℒ(A)_kl  = 2δ_kl Σ_i c_ik a_ii − (s_k + s_l) a_kl`,
    /// `ℒ†(ρ)_kl = 2δ_kl Σ_j c_kj ρ_jj − (s_k + s_l) ρ_kl`.
    fn frame_action(&self, x: &CMatrix, dual: bool) -> CMatrix {
        let n = self.dim();
        let s = self.column_sums();
        let mut out = CMatrix::zeros(n);
        for k in 0..n {
            for l in 0..n {
                out.set(k, l, -x.get(k, l) * (s[k] + s[l]));
            }
            let gain: Complex64 = (0..n)
                .map(|i| {
                    let c = if dual {
                        self.rates[[k, i]]
                    } else {
                        self.rates[[i, k]]
                    };
                    x.get(i, i) * c
                })
                .sum();
            out.set(k, k, out.get(k, k) + gain * 2.0);
        }
        out
    }

    /// `Δ_σ(A) = σ A σ⁻¹`.
    pub fn modular_delta(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        Ok(self.conjugate_diagonal(a, |l| (-l).exp()))
    }

    /// `Δ_σ⁻¹(A) = σ⁻¹ A σ`.
    pub fn modular_delta_inverse(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        Ok(self.conjugate_diagonal(a, |l| l.exp()))
    }

    /// `α_t(A) = e^{ith} A e^{-ith}` with `h = −log σ`.
    pub fn modular_automorphism(&self, t: f64, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        let n = self.dim();
        let phases: Vec<Complex64> = self
            .lambdas
            .iter()
            .map(|&l| Complex64::from_polar(1.0, t * l))
            .collect();
        let x = self.to_frame(a);
        let mut y = CMatrix::zeros(n);
        for k in 0..n {
            for l in 0..n {
                y.set(k, l, phases[k] * x.get(k, l) * phases[l].conj());
            }
        }
        Ok(self.out_of_frame(&y))
    }

    /// `D A D⁻¹` with `D = Σ_j f(λ_j)|η_j⟩⟨η_j|`.
    fn conjugate_diagonal(&self, a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let d: Vec<f64> = self.lambdas.iter().map(|&l| f(l)).collect();
        let x = self.to_frame(a);
        let mut y = CMatrix::zeros(n);
        for k in 0..n {
            for l in 0..n {
                y.set(k, l, x.get(k, l) * (d[k] / d[l]));
            }
        }
        self.out_of_frame(&y)
    }

    /// Dense matrix of `ℒ` (or `ℒ†` when `dual`) acting on column-stacked vectors.
    pub fn to_superoperator(&self, dual: bool) -> Superoperator {
        let n = self.dim();
        let mut mat = Array2::zeros((n * n, n * n));
        for j in 0..n {
            for i in 0..n {
                let e = CMatrix::unit(n, i, j);
                let image = if dual {
                    self.apply_dual(&e)
                } else {
                    self.apply(&e)
                }
                .expect("dimension matches");
                mat.column_mut(i + j * n).assign(&image.vectorize());
            }
        }
        Superoperator {
            n,
            mat: CMatrix::from_array_unchecked(mat),
        }
    }

    /// `e^{tℒ}(X)`, or `e^{tℒ†}(X)` when `dual`.
    pub fn evolve(&self, t: f64, x: &CMatrix, dual: bool) -> Result<CMatrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        self.check_dim(x)?;
        if t == 0.0 {
            return Ok(x.clone());
        }
        self.to_superoperator(dual).propagator(t).apply(x)
    }

    /// Schrödinger evolution of a density, with trace and positivity of the
    /// result checked to [`EVOLUTION_TOL`].
    pub fn evolve_density(&self, t: f64, rho: &DensityMatrix) -> Result<EvolvedDensity> {
        let state = self.evolve(t, rho.matrix(), true)?;
        let trace = state.trace();
        let trace_error = (trace - 1.0).norm();
        if trace_error > EVOLUTION_TOL {
            return Err(Error::CrossCheck {
                what: "trace preservation",
                discrepancy: trace_error,
                tolerance: EVOLUTION_TOL,
            });
        }
        let min_eigenvalue = herm_eig(&state)?.min_eigenvalue();
        if min_eigenvalue < -EVOLUTION_TOL {
            return Err(Error::CrossCheck {
                what: "positivity preservation",
                discrepancy: -min_eigenvalue,
                tolerance: EVOLUTION_TOL,
            });
        }
        Ok(EvolvedDensity {
            state,
            trace_error,
            min_eigenvalue,
        })
    }

    /// The `n²` eigenvalues of `ℒ`, ascending.
    ///
    /// In the η frame the off-diagonal units `|η_k⟩⟨η_l|` are eigenmatrices
    /// with eigenvalue `−(s_k + s_l)`, and the diagonal block is the classical
    /// rate matrix, which is similar to a symmetric matrix under detailed
    /// balance. Fails with `NotHermitian` when detailed balance is broken.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let s = self.column_sums();
        let p = self.sigma_weights();
        let mut sym = CMatrix::zeros(n);
        for k in 0..n {
            for i in 0..n {
                let q = 2.0 * self.rates[[i, k]] - if i == k { 2.0 * s[k] } else { 0.0 };
                sym.set(k, i, Complex64::new(q * (p[k] / p[i]).sqrt(), 0.0));
            }
        }
        let mut out = herm_eig(&sym)?.eigenvalues;
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    out.push(-(s[k] + s[l]));
                }
            }
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// `⟨A, B⟩_σ = tr(σ Aᴴ B)`.
    pub fn sigma_inner(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        self.sigma.matrix().matmul(&a.adjoint()).matmul(b).trace()
    }

    /// Randomized detailed-balance diagnostic over `samples` Hermitian pairs.
    pub fn check_dbc(&self, samples: usize, seed: u64) -> DbcReport {
        self.check_dbc_with_tolerance(samples, seed, DBC_TOL)
    }

    pub fn check_dbc_with_tolerance(&self, samples: usize, seed: u64, tolerance: f64) -> DbcReport {
        let n = self.dim();
        let mut rng = random::seeded(seed);
        let mut symmetry = 0.0_f64;
        let mut modular = 0.0_f64;
        for _ in 0..samples {
            let a = random::hermitian(n, &mut rng);
            let b = random::hermitian(n, &mut rng);
            let la = self.apply(&a).expect("dimension matches");
            let lb = self.apply(&b).expect("dimension matches");
            let lhs = self.sigma_inner(&la, &b);
            let rhs = self.sigma_inner(&a, &lb);
            symmetry = symmetry.max((lhs - rhs).norm());

            let ld = self
                .apply(&self.modular_delta(&a).expect("dimension matches"))
                .expect("dimension matches");
            let dl = self.modular_delta(&la).expect("dimension matches");
            modular = modular.max(ld.distance(&dl));
        }
        let stationarity = self
            .apply_dual(self.sigma.matrix())
            .expect("dimension matches")
            .frobenius_norm();
        let unit = self
            .apply(&CMatrix::identity(n))
            .expect("dimension matches")
            .frobenius_norm();
        DbcReport {
            samples,
            seed,
            symmetry_deviation: symmetry,
            modular_deviation: modular,
            stationarity_residual: stationarity,
            unit_residual: unit,
            tolerance,
            passed: symmetry < tolerance
                && modular < tolerance
                && stationarity < tolerance
                && unit < tolerance,
        }
    }
}

/// Result of [`DbcGenerator::check_dbc`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbcReport {
    pub samples: usize,
    pub seed: u64,
    /// `max |⟨ℒ(A),B⟩_σ − ⟨A,ℒ(B)⟩_σ|`
    pub symmetry_deviation: f64,
    /// `max ‖(ℒ∘Δ_σ − Δ_σ∘ℒ)(A)‖_F`
    pub modular_deviation: f64,
    /// `‖ℒ†(σ)‖_F`
    pub stationarity_residual: f64,
    /// `‖ℒ(I)‖_F`
    pub unit_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct EvolvedDensity {
    pub state: CMatrix,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

/// A linear map on `n x n` matrices as an `n² x n²` matrix in the
/// column-stacking convention of [`CMatrix::vectorize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub n: usize,
    pub mat: CMatrix,
}

impl Superoperator {
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        let v = self.mat.as_array().dot(&x.vectorize());
        CMatrix::devectorize(&v)
    }

    /// `e^{t·self}`.
    pub fn propagator(&self, t: f64) -> Superoperator {
        Superoperator {
            n: self.n,
            mat: expm(&self.mat.scale_real(t)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GeneratorJson {
    sigma: MatrixJson,
    lambdas: Vec<f64>,
    etas: MatrixJson,
}

impl Serialize for DbcGenerator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GeneratorJson {
            sigma: self.sigma.matrix().into(),
            lambdas: self.lambdas.clone(),
            etas: (&self.etas).into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DbcGenerator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = GeneratorJson::deserialize(d)?;
        let sigma = CMatrix::try_from(json.sigma).map_err(D::Error::custom)?;
        let sigma = DensityMatrix::new(sigma).map_err(D::Error::custom)?;
        let etas = CMatrix::try_from(json.etas).map_err(D::Error::custom)?;
        DbcGenerator::from_parts(sigma, json.lambdas, etas).map_err(D::Error::custom)
    }
}
