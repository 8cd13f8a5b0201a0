//! Reduction of a detailed-balance generator to a classical Markov chain.
//!
//! With `F_k = |η_k⟩⟨η_k|` the rate matrix is `Q_lk = tr(F_l ℒ(F_k))`, which
//! for the generators built in [`crate::lindblad`] evaluates to
//! `Q_lk = 2e^{-w_kl/2} − 2δ_lk Σ_i e^{-w_il/2}`. It depends only on the
//! weights, not on the eigenvectors. States are labeled in η order, and the
//! invariant vector is `σ⃗_k = e^{-λ_k}`.
//!
//! `F_k` is a rank-one projector so `tr(F_k) = 1`; the diagonal embedding
//! `Σ_k p_k F_k / tr(F_k)` is therefore just `Σ_k p_k F_k`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::DensityMatrix;
use crate::eigen::herm_eig;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::lindblad::DbcGenerator;
use crate::matrix::CMatrix;

/// Row sums of `Q` must vanish to this, relative to the largest rate.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Tolerance for `σ⃗Q = 0` and `σ_i Q_ik = σ_k Q_ki`.
pub const BALANCE_TOL: f64 = 1e-10;
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Slack on the evolved vector: total mass to `1e-10`, entries above `-1e-12`.
pub const EVOLVED_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChain {
    q: Array2<f64>,
    invariant: Vec<f64>,
}

/// The classical chain associated with `g`.
pub fn reduce(g: &DbcGenerator) -> ClassicalChain {
    let n = g.dim();
    let r = g.rates();
    let q = Array2::from_shape_fn((n, n), |(l, k)| {
        let exit = if l == k {
            (0..n).map(|i| r[[i, l]]).sum::<f64>()
        } else {
            0.0
        };
        2.0 * r[[k, l]] - 2.0 * exit
    });
    ClassicalChain {
        q,
        invariant: g.sigma_weights(),
    }
}

impl ClassicalChain {
    /// Validates a rate matrix and its invariant vector.
    pub fn new(q: Array2<f64>, invariant: Vec<f64>) -> Result<Self> {
        let n = invariant.len();
        if q.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.nrows(),
            });
        }
        validate_probability(&invariant, n)?;
        let chain = Self { q, invariant };
        for l in 0..n {
            for k in 0..n {
                if l != k && chain.q[[l, k]].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(Error::Invalid(format!(
                        "off-diagonal rate q[{l}][{k}] = {} is not positive",
                        chain.q[[l, k]]
                    )));
                }
            }
        }
        let scale = chain.scale();
        let checks = [
            ("row sums", chain.row_sum_residual(), ROW_SUM_TOL * scale),
            ("invariance", chain.stationarity_residual(), BALANCE_TOL * scale),
            ("detailed balance", chain.detailed_balance_residual(), BALANCE_TOL * scale),
        ];
        for (what, discrepancy, tolerance) in checks {
            if discrepancy > tolerance {
                return Err(Error::CrossCheck {
                    what,
                    discrepancy,
                    tolerance,
                });
            }
        }
        Ok(chain)
    }

    pub fn dim(&self) -> usize {
        self.invariant.len()
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn invariant(&self) -> &[f64] {
        &self.invariant
    }

    fn scale(&self) -> f64 {
        self.q.iter().fold(1.0_f64, |m, x| m.max(x.abs()))
    }

    /// `max_l |Σ_k Q_lk|`
    pub fn row_sum_residual(&self) -> f64 {
        self.q
            .rows()
            .into_iter()
            .map(|row| row.sum().abs())
            .fold(0.0, f64::max)
    }

    /// `max_k |(σ⃗Q)_k|`
    pub fn stationarity_residual(&self) -> f64 {
        let s = Array1::from(self.invariant.clone());
        s.dot(&self.q).iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// `max_{i,k} |σ_i Q_ik − σ_k Q_ki|`
    pub fn detailed_balance_residual(&self) -> f64 {
        let n = self.dim();
        let s = &self.invariant;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for k in 0..n {
                worst = worst.max((s[i] * self.q[[i, k]] - s[k] * self.q[[k, i]]).abs());
            }
        }
        worst
    }

    /// The same chain with states renamed: new state `i` is old state `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        Ok(Self {
            q: Array2::from_shape_fn((n, n), |(i, k)| self.q[[perm[i], perm[k]]]),
            invariant: perm.iter().map(|&p| self.invariant[p]).collect(),
        })
    }

    /// Eigenvalues of `Q`, ascending. Detailed balance makes
    /// `D^{1/2} Q D^{-1/2}` symmetric for `D = diag(σ⃗)`, so they are real.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let s = &self.invariant;
        let sym = Array2::from_shape_fn((n, n), |(i, k)| {
            Complex64::new(self.q[[i, k]] * (s[i] / s[k]).sqrt(), 0.0)
        });
        Ok(herm_eig(&CMatrix::new(sym)?)?.eigenvalues)
    }
}

fn validate_probability(p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidProbability(format!(
            "expected {n} entries, found {}",
            p.len()
        )));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidProbability(format!("entry {x} is negative or non-finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidProbability(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Chapman–Kolmogorov flow `p(t) = e^{tQᵀ} p(0)`.
pub fn evolve_classical(chain: &ClassicalChain, t: f64, p0: &[f64]) -> Result<Vec<f64>> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    let n = chain.dim();
    validate_probability(p0, n)?;
    if t == 0.0 {
        return Ok(p0.to_vec());
    }
    let qt = Array2::from_shape_fn((n, n), |(i, k)| Complex64::new(t * chain.q[[k, i]], 0.0));
    let prop = expm(&CMatrix::new(qt)?);
    let p0c: Array1<Complex64> = p0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let p: Vec<f64> = prop.as_array().dot(&p0c).iter().map(|z| z.re).collect();

    let mass: f64 = p.iter().sum();
    if (mass - 1.0).abs() > EVOLVED_MASS_TOL {
        return Err(Error::CrossCheck {
            what: "probability mass",
            discrepancy: (mass - 1.0).abs(),
            tolerance: EVOLVED_MASS_TOL,
        });
    }
    if let Some(&x) = p.iter().find(|x| **x < -PROBABILITY_TOL) {
        return Err(Error::CrossCheck {
            what: "nonnegativity",
            discrepancy: -x,
            tolerance: PROBABILITY_TOL,
        });
    }
    Ok(p)
}

/// `Σ_k p_k |η_k⟩⟨η_k|`, a density commuting with `σ`.
pub fn embed_diagonal(g: &DbcGenerator, p: &[f64]) -> Result<DensityMatrix> {
    validate_probability(p, g.dim())?;
    let mut m = CMatrix::zeros(g.dim());
    for (k, &pk) in p.iter().enumerate() {
        m = &m + &g.jump(k, k).scale_real(pk);
    }
    DensityMatrix::new(m.hermitian_part())
}

/// `p_k = tr(F_k ρ) = ⟨η_k|ρ|η_k⟩`.
pub fn project_diagonal(g: &DbcGenerator, rho: &CMatrix) -> Result<Vec<f64>> {
    rho.ensure_same_dim(g.etas())?;
    Ok((0..g.dim())
        .map(|k| g.jump(k, k).matmul(rho).trace().re)
        .collect())
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    q: Vec<Vec<f64>>,
    invariant: Vec<f64>,
}

impl Serialize for ClassicalChain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainJson {
            q: self.q.rows().into_iter().map(|r| r.to_vec()).collect(),
            invariant: self.invariant.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassicalChain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = ChainJson::deserialize(d)?;
        let n = json.q.len();
        if json.q.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("q must be square"));
        }
        let flat: Vec<f64> = json.q.into_iter().flatten().collect();
        let q = Array2::from_shape_vec((n, n), flat).map_err(D::Error::custom)?;
        ClassicalChain::new(q, json.invariant).map_err(D::Error::custom)
    }
}
