//! Dense Hermitian helpers on top of faer.
//!
//! faer is built without its rayon feature, so every decomposition here runs
//! sequentially and produces bit-identical results regardless of how many
//! sweep points are evaluated concurrently.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{KerrError, Result};

/// Entries smaller than this fraction of the largest entry are set to zero
/// before any decomposition. Couplings near the underflow threshold stall
/// faer's tridiagonal QR iteration; at this level the change is far below
/// rounding error.
pub const FLUSH_RELATIVE: f64 = 1e-30;

fn flushed(matrix: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut largest = 0.0f64;
    for j in 0..matrix.ncols() {
        for i in 0..matrix.nrows() {
            largest = largest.max(matrix[(i, j)].norm());
        }
    }
    let cut = largest * FLUSH_RELATIVE;
    Mat::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
        let v = matrix[(i, j)];
        if v.norm() < cut {
            Complex64::new(0.0, 0.0)
        } else {
            v
        }
    })
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order. Only the lower
/// triangle is read.
pub fn hermitian_eigenvalues(matrix: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    flushed(matrix)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| KerrError::Eigensolver(format!("{e:?}")))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Negative round-off eigenvalues are clipped to zero.
pub fn psd_sqrt(matrix: MatRef<'_, Complex64>) -> Result<Mat<Complex64>> {
    let n = matrix.nrows();
    let eig = flushed(matrix)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| KerrError::Eigensolver(format!("{e:?}")))?;
    let u = eig.U();
    let roots: Vec<f64> = eig
        .S()
        .column_vector()
        .iter()
        .map(|l| l.re.max(0.0).sqrt())
        .collect();
    let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * roots[k]);
    Ok(&scaled * u.adjoint())
}

/// Sum of singular values.
pub fn nuclear_norm(matrix: MatRef<'_, Complex64>) -> Result<f64> {
    let sv = flushed(matrix)
        .singular_values()
        .map_err(|e| KerrError::Eigensolver(format!("{e:?}")))?;
    Ok(sv.iter().sum())
}

/// Smallest contiguous index window outside of which the nonnegative
/// `weights` carry at most `tol` in total (split evenly between both ends).
pub fn support_window(weights: &[f64], tol: f64) -> std::ops::Range<usize> {
    let n = weights.len();
    let budget = 0.5 * tol;
    let mut lo = 0;
    let mut dropped = 0.0;
    while lo < n && dropped + weights[lo].max(0.0) <= budget {
        dropped += weights[lo].max(0.0);
        lo += 1;
    }
    let mut hi = n;
    dropped = 0.0;
    while hi > lo + 1 && dropped + weights[hi - 1].max(0.0) <= budget {
        dropped += weights[hi - 1].max(0.0);
        hi -= 1;
    }
    if lo >= hi {
        return 0..n;
    }
    lo..hi
}
