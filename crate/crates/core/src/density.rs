//! Density matrices: Hermitian, positive semidefinite, unit trace.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen::{herm_eig, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Eigenvalues below `-PSD_CLAMP` are rejected; those in `[-PSD_CLAMP, 0)` are clamped.
pub const PSD_CLAMP: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// A density is faithful when every eigenvalue exceeds this.
/// Multiple of `n·ε·λ_max` below which an eigenvalue is treated as zero.
pub const ROUNDOFF_FLOOR: f64 = 4.0 * f64::EPSILON;
pub const FAITHFUL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let mut spectrum = herm_eig(&matrix)?;
        let min = spectrum.min_eigenvalue();
        if min < -PSD_CLAMP {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        // eigenvalues inside the solver's roundoff band are zero; leaving
        // them in would put errors of order sqrt(eps) into any square root
        let floor = ROUNDOFF_FLOOR * matrix.dim() as f64 * spectrum.max_eigenvalue().max(0.0);
        for x in spectrum.eigenvalues.iter_mut() {
            if *x <= floor {
                *x = 0.0;
            }
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { trace: trace.re });
        }
        Ok(Self { matrix, spectrum })
    }

    /// The maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(CMatrix::identity(n).scale_real(1.0 / n as f64))
            .expect("I/n is a density")
    }

    /// `diag(p)` for a probability vector `p`.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diag(p))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_faithful(&self) -> bool {
        self.spectrum.min_eigenvalue() > FAITHFUL_TOL
    }

    pub fn ensure_faithful(&self) -> Result<()> {
        if self.is_faithful() {
            Ok(())
        } else {
            Err(Error::NotFaithful {
                min_eigenvalue: self.spectrum.min_eigenvalue(),
            })
        }
    }

    /// `ρ^{1/2}` from the cached spectrum.
    pub fn sqrt(&self) -> CMatrix {
        self.spectrum.map(f64::sqrt)
    }

    /// Hermiticity deviation of the stored matrix, for diagnostics.
    pub fn hermitian_deviation(&self) -> f64 {
        self.matrix.hermitian_deviation()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = CMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
