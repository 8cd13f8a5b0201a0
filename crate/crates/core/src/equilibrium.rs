//! Laplacian entropy, pressure and equilibrium densities.
//!
//! The entropy of a density `ρ` is `h(ρ) = tr(ρ^{1/2} ℒ₀†(ρ^{1/2}))`, where
//! `ℒ₀` generates the heat semigroup; it depends only on the spectrum,
//! `h(ρ) = 2(Σ_i √p_i)² − 2n`. For a Hermitian `A` the pressure is
//! `sup_ρ h(ρ) + tr(Aρ)`. The maximizer is diagonal in the eigenframe of `A`
//! with `√ρ_ii ∝ 1/(κ − a_i)`, where `κ > max a_i` solves
//! `Σ_i 1/(κ − a_i) = 1/2`; the supremum equals `κ − 2n`.

use serde::Serialize;

use crate::density::DensityMatrix;
use crate::eigen::{herm_eig, inverse_pd, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::lindblad::{build_dbc_generator, build_l0, DbcGenerator};
use crate::matrix::CMatrix;
use crate::random;

/// Allowed gap between `κ − 2n` and `h(ρ_A) + tr(Aρ_A)`.
pub const PRESSURE_CROSSCHECK_TOL: f64 = 1e-8;
/// Allowed gap between the closed form and the literal rate functional (relative).
pub const RATE_CROSSCHECK_TOL: f64 = 1e-9;
/// Witnesses must have every eigenvalue above this.
pub const WITNESS_THRESHOLD: f64 = 1e-12;
pub const INFIMUM_TOL: f64 = 1e-9;
/// Spectral-norm bound for the `e^H` witnesses sampled by [`verify_rate_infimum`].
pub const WITNESS_LOG_NORM: f64 = 2.0;

/// `h(ρ) = 2(Σ_i √p_i)² − 2n` from the spectrum of `ρ`.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    let n = rho.dim() as f64;
    let root_sum: f64 = rho.eigenvalues().iter().map(|p| p.sqrt()).sum();
    2.0 * root_sum * root_sum - 2.0 * n
}

/// `h(ρ) = tr(ρ^{1/2} ℒ₀†(ρ^{1/2}))`, evaluated through the heat generator.
pub fn entropy_via_generator(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    if n < 2 {
        return 0.0;
    }
    let l0 = build_l0(n).expect("n >= 2");
    let xi = rho.sqrt();
    let image = l0.apply_dual(&xi).expect("dimension matches");
    xi.matmul(&image).trace().re
}

/// `P_A(ρ) = h(ρ) + tr(Aρ)`.
pub fn pressure_functional(a: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    ensure_hermitian(a)?;
    a.ensure_same_dim(rho.matrix())?;
    Ok(entropy(rho) + a.matmul(rho.matrix()).trace().re)
}

fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

const KAPPA_WIDTH: f64 = 1e-13;
const NEWTON_STEPS: usize = 2;

/// The unique `κ > max a_i` with `Σ_i 1/(κ − a_i) = 1/2`.
///
/// The root lies in `(max a_i, max a_i + 2n]` because the sum is at most
/// `n/(κ − max a_i)`. Bisection on that bracket to width `1e-13`, then two
/// Newton steps kept inside the bracket.
pub fn solve_kappa(diag_a: &[f64]) -> Result<f64> {
    if diag_a.is_empty() {
        return Err(Error::Invalid("empty spectrum".into()));
    }
    if diag_a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = diag_a.len() as f64;
    let top = diag_a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f = |k: f64| diag_a.iter().map(|a| 1.0 / (k - a)).sum::<f64>() - 0.5;
    let df = |k: f64| -diag_a.iter().map(|a| (k - a).powi(-2)).sum::<f64>();

    let scale = top.abs().max(1.0);
    let (lo0, hi0) = (top + 1e-9 * scale, top + 2.0 * n);
    let (mut lo, mut hi) = (lo0, hi0);
    if f(hi) >= 0.0 {
        // only when every a_i equals the max; the root is the upper end
        return Ok(hi);
    }
    while hi - lo > KAPPA_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut kappa = 0.5 * (lo + hi);
    for _ in 0..NEWTON_STEPS {
        let step = kappa - f(kappa) / df(kappa);
        if step.is_finite() && step > lo0 && step <= hi0 {
            kappa = step;
        }
    }
    Ok(kappa)
}

/// The pressure maximizer for a Hermitian `A` and the data that certify it.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumResult {
    pub hamiltonian: CMatrix,
    /// Eigenvalues `a_i` of `A`, ascending.
    pub hamiltonian_spectrum: Vec<f64>,
    pub kappa: f64,
    /// `ξ = ρ_A^{1/2}`
    pub xi: CMatrix,
    pub rho: DensityMatrix,
    /// `U` with `U A Uᴴ = diag(a_i)`.
    pub unitary: CMatrix,
    /// Diagonal of `U ρ_A Uᴴ`.
    pub frame_density: Vec<f64>,
    /// `κ − 2n`
    pub pressure: f64,
    /// `h(ρ_A) + tr(Aρ_A)`
    pub pressure_check: f64,
    /// Normalization with `ξ_ii = c/(κ − a_i)` in the eigenframe.
    pub c: f64,
}

/// Residuals of the identities an equilibrium must satisfy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquilibriumResiduals {
    /// `‖2κξ − 4tr(ξ)I − Aξ − ξA‖_F` in the eigenframe of `A`.
    pub lagrange_frame: f64,
    /// Same, in the original frame.
    pub lagrange: f64,
    /// `‖𝔏_A(ξ) − κξ‖_F`
    pub eigenrelation: f64,
    /// `|tr(Aξ) − (κ − 2n) tr(ξ)|`
    pub trace_identity: f64,
    /// `‖κρ − 2tr(ξ)ξ − (Aρ + ξAξ)/2‖_F`
    pub quadratic: f64,
    /// `|tr(ξ²) − 1|`
    pub normalization: f64,
    /// `|κ − 2n − (h(ρ_A) + tr(Aρ_A))|`
    pub pressure: f64,
}

/// Equilibrium density for a Hermitian `A`.
pub fn equilibrium(a: &CMatrix) -> Result<EquilibriumResult> {
    ensure_hermitian(a)?;
    let n = a.dim();
    let spec = herm_eig(a)?;
    let kappa = solve_kappa(&spec.eigenvalues)?;
    let inv: Vec<f64> = spec.eigenvalues.iter().map(|ai| 1.0 / (kappa - ai)).collect();
    let c = inv.iter().map(|x| x * x).sum::<f64>().powf(-0.5);
    let xi_frame: Vec<f64> = inv.iter().map(|x| c * x).collect();
    let frame_density: Vec<f64> = xi_frame.iter().map(|x| x * x).collect();

    let v = &spec.eigenvectors;
    let rotate_back =
        |d: &[f64]| v.matmul(&CMatrix::from_diag(d)).matmul(&v.adjoint()).hermitian_part();
    let xi = rotate_back(&xi_frame);
    let rho = DensityMatrix::new(rotate_back(&frame_density))?;

    let pressure = kappa - 2.0 * n as f64;
    let pressure_check = entropy(&rho) + a.matmul(rho.matrix()).trace().re;
    let discrepancy = (pressure - pressure_check).abs();
    if discrepancy > PRESSURE_CROSSCHECK_TOL {
        return Err(Error::CrossCheck {
            what: "pressure κ − 2n vs h(ρ) + tr(Aρ)",
            discrepancy,
            tolerance: PRESSURE_CROSSCHECK_TOL,
        });
    }

    Ok(EquilibriumResult {
        hamiltonian: a.clone(),
        hamiltonian_spectrum: spec.eigenvalues.clone(),
        kappa,
        xi,
        rho,
        unitary: v.adjoint(),
        frame_density,
        pressure,
        pressure_check,
        c,
    })
}

impl EquilibriumResult {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `U ξ Uᴴ`, diagonal up to rounding.
    pub fn xi_frame(&self) -> CMatrix {
        self.unitary.matmul(&self.xi).matmul(&self.unitary.adjoint())
    }

    pub fn residuals(&self) -> EquilibriumResiduals {
        let n = self.dim();
        let a = &self.hamiltonian;
        let xi = &self.xi;
        let kappa = self.kappa;
        let lagrange_of = |a: &CMatrix, xi: &CMatrix| {
            let lhs = xi.scale_real(2.0 * kappa);
            let rhs = &(&CMatrix::identity(n).scale(xi.trace() * 4.0) + &a.matmul(xi))
                + &xi.matmul(a);
            lhs.distance(&rhs)
        };
        let lambda = CMatrix::from_diag(&self.hamiltonian_spectrum);
        let xi_frame = CMatrix::from_diag(
            &self
                .frame_density
                .iter()
                .map(|p| p.sqrt())
                .collect::<Vec<_>>(),
        );
        let eigen = transfer_apply(a, xi)
            .expect("dimension matches")
            .distance(&xi.scale_real(kappa));
        let trace_identity =
            (a.matmul(xi).trace() - xi.trace() * (kappa - 2.0 * n as f64)).norm();
        let rho = self.rho.matrix();
        let quadratic_rhs = &xi.scale(xi.trace() * 2.0)
            + &(&a.matmul(rho) + &xi.matmul(a).matmul(xi)).scale_real(0.5);
        EquilibriumResiduals {
            lagrange_frame: lagrange_of(&lambda, &xi_frame),
            lagrange: lagrange_of(a, xi),
            eigenrelation: eigen,
            trace_identity,
            quadratic: rho.scale_real(kappa).distance(&quadratic_rhs),
            normalization: (xi.matmul(xi).trace().re - 1.0).abs(),
            pressure: (self.pressure - self.pressure_check).abs(),
        }
    }
}

/// `𝔏_A(ξ) = 2tr(ξ)I + (Aξ + ξA)/2`.
pub fn transfer_apply(a: &CMatrix, xi: &CMatrix) -> Result<CMatrix> {
    a.ensure_same_dim(xi)?;
    let n = a.dim();
    let sym = (&a.matmul(xi) + &xi.matmul(a)).scale_real(0.5);
    Ok(&CMatrix::identity(n).scale(xi.trace() * 2.0) + &sym)
}

/// The detailed-balance generator whose invariant density is `ρ_A`.
pub fn equilibrium_generator(a: &CMatrix) -> Result<DbcGenerator> {
    let eq = equilibrium(a)?;
    build_dbc_generator(&eq.rho)
}

/// `tr(ρ W⁻¹ ℒ₀(W))` for a positive definite witness `W`, via the closed form
/// `2 tr(ρW⁻¹) tr(W) − 2n`, cross-checked against the literal expression.
pub fn rate_functional(rho: &DensityMatrix, witness: &CMatrix) -> Result<f64> {
    rho.matrix().ensure_same_dim(witness)?;
    ensure_hermitian(witness)?;
    let n = rho.dim();
    let (inv, _) = inverse_pd(witness, WITNESS_THRESHOLD)?;
    let rho_inv = rho.matrix().matmul(&inv);
    let closed = 2.0 * rho_inv.trace().re * witness.trace().re - 2.0 * n as f64;

    let l0 = build_l0(n)?;
    let literal = rho_inv.matmul(&l0.apply(witness)?).trace().re;
    let discrepancy = (closed - literal).abs();
    let tolerance = RATE_CROSSCHECK_TOL * closed.abs().max(1.0);
    if discrepancy > tolerance {
        return Err(Error::CrossCheck {
            what: "rate functional closed form vs literal",
            discrepancy,
            tolerance,
        });
    }
    Ok(closed)
}

/// `tr(BU) tr(UB⁻¹) − tr(U)²`, nonnegative for `B > 0`, `U ≥ 0`.
pub fn trace_product_gap(b: &CMatrix, u: &CMatrix) -> Result<f64> {
    b.ensure_same_dim(u)?;
    ensure_hermitian(b)?;
    let (b_inv, _) = inverse_pd(b, WITNESS_THRESHOLD)?;
    let lhs = b.matmul(u).trace() * u.matmul(&b_inv).trace();
    let tr_u = u.trace();
    Ok((lhs - tr_u * tr_u).re)
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub rho: DensityMatrix,
    pub entropy: f64,
    /// Minimum of the rate functional over all evaluated witnesses.
    pub infimum_estimate: f64,
    /// The witness attaining `infimum_estimate`.
    pub witness: CMatrix,
    /// Value at the analytic witness `ρ^{1/2}`.
    pub analytic_value: f64,
    /// Minimum over the random witnesses alone.
    pub sampled_minimum: f64,
    pub samples: usize,
    pub seed: u64,
    /// Random witnesses whose value fell below `h(ρ) − 1e-9`.
    pub violations: usize,
    pub passed: bool,
}

/// Evaluates the rate functional at `ρ^{1/2}` and at `samples` random
/// witnesses `e^H`, `‖H‖₂ ≤ 2`, and checks that the minimum is `h(ρ)`.
pub fn verify_rate_infimum(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<RateReport> {
    rho.ensure_faithful()?;
    let n = rho.dim();
    let h = entropy(rho);
    let analytic_witness = rho.sqrt();
    let analytic_value = rate_functional(rho, &analytic_witness)?;

    let mut rng = random::seeded(seed);
    let mut best = (analytic_value, analytic_witness);
    let mut sampled_minimum = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let w = random::positive_definite(n, WITNESS_LOG_NORM, &mut rng);
        let value = rate_functional(rho, &w)?;
        if value < h - INFIMUM_TOL {
            violations += 1;
        }
        sampled_minimum = sampled_minimum.min(value);
        if value < best.0 {
            best = (value, w);
        }
    }
    let passed = violations == 0 && (best.0 - h).abs() <= INFIMUM_TOL;
    Ok(RateReport {
        rho: rho.clone(),
        entropy: h,
        infimum_estimate: best.0,
        witness: best.1,
        analytic_value,
        sampled_minimum,
        samples,
        seed,
        violations,
        passed,
    })
}
