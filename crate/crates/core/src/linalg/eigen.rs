//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::dense::{DenseMatrix, Vector};
use crate::scalar::Scalar;

/// Hard cap on full Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Default relative cut for the numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `A = Q·diag(λ)·Qᵀ` with eigenvalues sorted descending. The first `rank`
/// columns of `Q` span the range of `A`, the remaining ones its null space.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T> {
    pub q: DenseMatrix<T>,
    pub lambdas: Vec<T>,
    pub rank: usize,
    pub rank_tol: T,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Nonzero eigenvalues `λ₁ ≥ … ≥ λ_r`.
    pub fn range_lambdas(&self) -> &[T] {
        &self.lambdas[..self.rank]
    }

    pub fn range_cols(&self) -> Range<usize> {
        0..self.rank
    }

    pub fn null_cols(&self) -> Range<usize> {
        self.rank..self.dim()
    }

    /// `λ₁/λ_r`, or `None` when the rank is zero.
    pub fn condition_number(&self) -> Option<T> {
        if self.rank == 0 {
            None
        } else {
            Some(self.lambdas[0] / self.lambdas[self.rank - 1])
        }
    }

    /// Assembles `Q·diag(λ)·Qᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = (0..n).fold(T::zero(), |acc, k| {
                    acc + self.q[(i, k)] * self.lambdas[k] * self.q[(j, k)]
                });
            }
        }
        a
    }
}

/// `Q[:, cols]ᵀ · v`.
pub(crate) fn project_onto<T: Scalar>(q: &DenseMatrix<T>, cols: Range<usize>, v: &[T]) -> Vector<T> {
    debug_assert_eq!(q.rows(), v.len());
    cols.map(|j| (0..q.rows()).fold(T::zero(), |acc, i| acc + q[(i, j)] * v[i]))
        .collect()
}

/// `Q[:, cols] · c`.
pub(crate) fn combine_columns<T: Scalar>(q: &DenseMatrix<T>, cols: Range<usize>, coeffs: &[T]) -> Vector<T> {
    debug_assert_eq!(cols.len(), coeffs.len());
    let mut out = vec![T::zero(); q.rows()];
    for (j, &c) in cols.zip(coeffs) {
        for (i, o) in out.iter_mut().enumerate() {
            *o += q[(i, j)] * c;
        }
    }
    Vector::from_vec(out)
}

/// Number of leading entries of a descending sequence strictly above
/// `rank_tol · max(values[0], 1)`.
pub(crate) fn numerical_rank<T: Scalar>(values: &[T], rank_tol: T) -> usize {
    let Some(&top) = values.first() else {
        return 0;
    };
    let cut = rank_tol * top.max(T::one());
    values.iter().take_while(|&&v| v > cut).count()
}

fn off_diagonal_norm<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a symmetric matrix.
///
/// Runs cyclic Jacobi sweeps until the off-diagonal Frobenius norm is at
/// most `1e-14·‖A‖_F`. Eigenpairs are returned in descending eigenvalue
/// order; ties keep their sweep order.
pub fn symmetric_eig<T: Scalar>(a: &DenseMatrix<T>, rank_tol: T) -> Result<SpectralDecomposition<T>> {
    a.check_symmetric()?;
    if rank_tol.is_nan() || rank_tol <= T::zero() {
        return Err(Error::InvalidInput("rank_tol must be positive".into()));
    }
    let n = a.rows();
    let half = T::lit(0.5);
    let mut w = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] = half * (a[(i, j)] + a[(j, i)]);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let target = T::tol(1e-14) * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let tau = (w[(q, q)] - w[(p, p)]) / (apq + apq);
                let t = tau.signum() / (tau.abs() + T::one().hypot(tau));
                let c = T::one() / T::one().hypot(t);
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let g = w[(k, p)];
                    let h = w[(k, q)];
                    let kp = c * g - s * h;
                    let kq = s * g + c * h;
                    w[(k, p)] = kp;
                    w[(p, k)] = kp;
                    w[(k, q)] = kq;
                    w[(q, k)] = kq;
                }
                w[(p, p)] -= t * apq;
                w[(q, q)] += t * apq;
                w[(p, q)] = T::zero();
                w[(q, p)] = T::zero();

                for k in 0..n {
                    let g = v[(k, p)];
                    let h = v[(k, q)];
                    v[(k, p)] = c * g - s * h;
                    v[(k, q)] = s * g + c * h;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > target {
        return Err(Error::NoConvergence {
            method: "jacobi eigensolver",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their sweep order
    order.sort_by(|&i, &j| w[(j, j)].partial_cmp(&w[(i, i)]).expect("finite eigenvalues"));

    let lambdas: Vec<T> = order.iter().map(|&k| w[(k, k)]).collect();
    let mut q = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            q[(i, dst)] = v[(i, src)];
        }
    }
    let rank = numerical_rank(&lambdas, rank_tol);
    Ok(SpectralDecomposition {
        q,
        lambdas,
        rank,
        rank_tol,
    })
}
