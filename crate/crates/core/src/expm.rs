//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ZERO};

/// Padé coefficients b_0..b_13 for the [13/13] approximant of `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the degree-13 approximant is used unscaled.
pub const THETA_13: f64 = 5.371_920_351_148_152;

/// `e^m` for any finite square complex matrix.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.dim();
    let norm = m.norm_1();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(0.5_f64.powi(squarings)).into_array();

    let id: Array2<Complex64> = Array2::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = &PADE13;

    let u_inner = &a6.dot(&(&a6 * b[13] + &a4 * b[11] + &a2 * b[9]))
        + &(&a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let u = a.dot(&u_inner);
    let v = &a6.dot(&(&a6 * b[12] + &a4 * b[10] + &a2 * b[8]))
        + &(&a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0]);

    let p = &v + &u;
    let q = &v - &u;
    // The denominator of the [13/13] approximant is nonsingular for ‖a‖₁ ≤ θ₁₃.
    let mut r = solve(q, p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    CMatrix::from_array_unchecked(r)
}

/// Solves `a x = b` by LU with partial pivoting; `b` may hold several right-hand sides.
pub fn solve(mut a: Array2<Complex64>, mut b: Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.nrows(),
        });
    }
    let m = b.ncols();
    let scale = a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    for k in 0..n {
        let (pivot, best) = (k..n)
            .map(|i| (i, a[[i, k]].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= f64::EPSILON * scale * 1e-3 || best == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != k {
            for j in 0..n {
                a.swap([k, j], [pivot, j]);
            }
            for j in 0..m {
                b.swap([k, j], [pivot, j]);
            }
        }
        let akk = a[[k, k]];
        for i in (k + 1)..n {
            let factor = a[[i, k]] / akk;
            if factor == ZERO {
                continue;
            }
            a[[i, k]] = ZERO;
            for j in (k + 1)..n {
                let t = a[[k, j]];
                a[[i, j]] -= factor * t;
            }
            for j in 0..m {
                let t = b[[k, j]];
                b[[i, j]] -= factor * t;
            }
        }
    }
    for j in 0..m {
        for i in (0..n).rev() {
            let mut acc = b[[i, j]];
            for k in (i + 1)..n {
                acc -= a[[i, k]] * b[[k, j]];
            }
            b[[i, j]] = acc / a[[i, i]];
        }
    }
    Ok(b)
}
