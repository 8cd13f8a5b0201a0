//! Dense complex square matrices.
//!
//! [`CMatrix`] is a thin validated wrapper around `ndarray::Array2<Complex64>`.
//! Every matrix in the crate (observables, densities, superoperator blocks)
//! goes through this type, so the square-and-finite invariant is checked once
//! at construction.
//!
//! Vectorization uses column stacking: entry `(i, j)` of an `n x n` matrix
//! lands at index `i + j * n`. With this convention `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Array2<Complex64>,
}

impl CMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    /// Internal constructor for results of operations on valid matrices.
    pub(crate) fn from_array_unchecked(data: Array2<Complex64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    /// Builds an `n x n` matrix from row-major entries.
    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let data = Array2::from_shape_vec((n, n), entries)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        Self::new(data)
    }

    /// Builds a real matrix from nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(n, entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_array_unchecked(Array2::zeros((n, n)))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_array_unchecked(Array2::eye(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = Array2::zeros((n, n));
        for (i, &d) in diag.iter().enumerate() {
            data[[i, i]] = Complex64::new(d, 0.0);
        }
        Self::from_array_unchecked(data)
    }

    /// The matrix unit `|i⟩⟨j|`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.data[[i, j]] = ONE;
        m
    }

    /// `|u⟩⟨v|` for column vectors `u`, `v`.
    pub fn outer(u: &Array1<Complex64>, v: &Array1<Complex64>) -> Self {
        let n = u.len();
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                data[[i, j]] = u[i] * v[j].conj();
            }
        }
        Self::from_array_unchecked(data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[[i, j]]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[[i, j]] = value;
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Array1<Complex64> {
        self.data.column(j).to_owned()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.data.diag().to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_array_unchecked(self.data.t().mapv(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_array_unchecked(self.data.t().to_owned())
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        Self::from_array_unchecked(self.data.dot(&other.data))
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        Self::from_array_unchecked(self.data.mapv(|z| z * s))
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        Self::from_array_unchecked(self.data.mapv(|z| z * s))
    }

    /// `self + s·I`.
    pub fn shift(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.data[[i, i]] += s;
        }
        out
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        self.data
            .axis_iter(Axis(1))
            .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    /// `‖self − other‖_F / max(‖other‖_F, 1)`.
    pub fn relative_distance(&self, other: &CMatrix) -> f64 {
        self.distance(other) / other.frobenius_norm().max(1.0)
    }

    /// `‖m − mᴴ‖_F / ‖m‖_F`, zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.distance(&self.adjoint()) / norm
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + mᴴ)/2`.
    pub fn hermitian_part(&self) -> CMatrix {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Column-stacked vectorization: entry `(i, j)` goes to index `i + j·n`.
    pub fn vectorize(&self) -> Array1<Complex64> {
        let n = self.dim();
        let mut v = Array1::zeros(n * n);
        for j in 0..n {
            for i in 0..n {
                v[i + j * n] = self.data[[i, j]];
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`].
    pub fn devectorize(v: &Array1<Complex64>) -> Result<CMatrix> {
        let len = v.len();
        let n = (len as f64).sqrt().round() as usize;
        if n == 0 || n * n != len {
            return Err(Error::DimensionMismatch {
                expected: n.max(1) * n.max(1),
                found: len,
            });
        }
        let mut data = Array2::zeros((n, n));
        for j in 0..n {
            for i in 0..n {
                data[[i, j]] = v[i + j * n];
            }
        }
        CMatrix::new(data)
    }

    pub fn ensure_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_array_unchecked(&self.data + &rhs.data)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_array_unchecked(&self.data - &rhs.data)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix::from_array_unchecked(self.data.mapv(|z| -z))
    }
}

/// Wire format: `{"n": int, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let data = m.data.iter().map(|z| [z.re, z.im]).collect();
        MatrixJson { n: m.dim(), data }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;
    fn try_from(json: MatrixJson) -> Result<Self> {
        let entries = json
            .data
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        CMatrix::from_row_major(json.n, entries)
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = MatrixJson::deserialize(deserializer)?;
        CMatrix::try_from(json).map_err(serde::de::Error::custom)
    }
}
