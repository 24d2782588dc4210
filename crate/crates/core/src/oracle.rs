//! Closed-form ground truth: range/null splitting, the Moore–Penrose
//! pseudoinverse assembled from spectral factors, and consistency tests.

use crate::error::{Error, Result};
use crate::linalg::{combine_columns, project_onto, DenseMatrix, SingularDecomposition, SpectralDecomposition, Vector};
use crate::scalar::Scalar;

/// Default relative threshold on the null-space part of a right-hand side.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-10;

/// A vector in the eigenbasis: `v¹ = Q₁ᵀv` and `v² = Q₂ᵀv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVector<T> {
    pub range_part: Vector<T>,
    pub null_part: Vector<T>,
}

impl<T: Scalar> SplitVector<T> {
    /// `Q₁v¹ + Q₂v²`.
    pub fn reassemble(&self, decomp: &SpectralDecomposition<T>) -> Vector<T> {
        let range = combine_columns(&decomp.q, decomp.range_cols(), &self.range_part);
        let null = combine_columns(&decomp.q, decomp.null_cols(), &self.null_part);
        range.add(&null)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport<T> {
    pub consistent: bool,
    pub null_norm: T,
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::dims(context, expected, found));
    }
    Ok(())
}

pub fn split<T: Scalar>(decomp: &SpectralDecomposition<T>, v: &Vector<T>) -> Result<SplitVector<T>> {
    check_len("split", decomp.dim(), v.len())?;
    Ok(SplitVector {
        range_part: project_onto(&decomp.q, decomp.range_cols(), v),
        null_part: project_onto(&decomp.q, decomp.null_cols(), v),
    })
}

/// `A†b = Q₁·Λr⁻¹·Q₁ᵀb`.
pub fn pseudoinverse_apply<T: Scalar>(decomp: &SpectralDecomposition<T>, b: &Vector<T>) -> Result<Vector<T>> {
    check_len("pseudoinverse_apply", decomp.dim(), b.len())?;
    let coords: Vec<T> = project_onto(&decomp.q, decomp.range_cols(), b)
        .iter()
        .zip(decomp.range_lambdas())
        .map(|(&c, &l)| c / l)
        .collect();
    Ok(combine_columns(&decomp.q, decomp.range_cols(), &coords))
}

/// Explicit `A† = Q·Λ†·Qᵀ`.
pub fn pseudoinverse_matrix<T: Scalar>(decomp: &SpectralDecomposition<T>) -> DenseMatrix<T> {
    let n = decomp.dim();
    let inv: Vec<T> = decomp.range_lambdas().iter().map(|&l| l.recip()).collect();
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = inv.iter().enumerate().fold(T::zero(), |acc, (k, &li)| {
                acc + decomp.q[(i, k)] * li * decomp.q[(j, k)]
            });
        }
    }
    p
}

/// Minimum-norm least squares solution `A†b = V₁·Σr⁻¹·U₁ᵀb`.
pub fn pinv_apply_rect<T: Scalar>(sdec: &SingularDecomposition<T>, b: &Vector<T>) -> Result<Vector<T>> {
    let (m, _) = sdec.shape();
    check_len("pinv_apply_rect", m, b.len())?;
    let coords: Vec<T> = sdec
        .left_range_coords(b)
        .iter()
        .zip(sdec.range_sigmas())
        .map(|(&c, &s)| c / s)
        .collect();
    Ok(sdec.right_combine(&coords))
}

/// Explicit `A† = V₁·Σr⁻¹·U₁ᵀ` (n×m).
pub fn pinv_matrix_rect<T: Scalar>(sdec: &SingularDecomposition<T>) -> DenseMatrix<T> {
    let (m, n) = sdec.shape();
    let inv: Vec<T> = sdec.range_sigmas().iter().map(|&s| s.recip()).collect();
    let mut p = DenseMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            p[(i, j)] = inv
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, &si)| acc + sdec.v[(i, k)] * si * sdec.u[(j, k)]);
        }
    }
    p
}

fn consistency<T: Scalar>(null_coords: &Vector<T>, b: &Vector<T>, tol: T) -> ConsistencyReport<T> {
    let null_norm = null_coords.norm();
    ConsistencyReport {
        consistent: null_norm <= tol * b.norm().max(T::one()),
        null_norm,
    }
}

/// Tests `b ∈ R(A)` through `‖Q₂ᵀb‖₂ ≤ tol·max(‖b‖₂, 1)`.
pub fn consistency_check<T: Scalar>(
    decomp: &SpectralDecomposition<T>,
    b: &Vector<T>,
    tol: T,
) -> Result<ConsistencyReport<T>> {
    check_len("consistency_check", decomp.dim(), b.len())?;
    let null = project_onto(&decomp.q, decomp.null_cols(), b);
    Ok(consistency(&null, b, tol))
}

/// Tests `b ∈ R(A)` for rectangular `A` through the left singular vectors.
pub fn consistency_check_rect<T: Scalar>(
    sdec: &SingularDecomposition<T>,
    b: &Vector<T>,
    tol: T,
) -> Result<ConsistencyReport<T>> {
    check_len("consistency_check_rect", sdec.shape().0, b.len())?;
    Ok(consistency(&sdec.left_null_coords(b), b, tol))
}
