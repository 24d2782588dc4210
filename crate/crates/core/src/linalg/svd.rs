//! Singular value decomposition by one-sided (Hestenes) Jacobi.

use crate::error::{Error, Result};
use crate::linalg::dense::{dot, DenseMatrix, Vector};
use crate::linalg::eigen::{combine_columns, numerical_rank, project_onto, MAX_SWEEPS};
use crate::scalar::Scalar;

/// `A = U·Σ·Vᵀ` with `U` (m×m) and `V` (n×n) orthogonal and `min(m, n)`
/// singular values sorted descending.
#[derive(Debug, Clone)]
pub struct SingularDecomposition<T> {
    pub u: DenseMatrix<T>,
    pub sigmas: Vec<T>,
    pub v: DenseMatrix<T>,
    pub rank: usize,
    pub rank_tol: T,
}

impl<T: Scalar> SingularDecomposition<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    /// Nonzero singular values `σ₁ ≥ … ≥ σ_r`.
    pub fn range_sigmas(&self) -> &[T] {
        &self.sigmas[..self.rank]
    }

    /// `(σ₁, σ_r)`, or `None` when the rank is zero.
    pub fn extreme_sigmas(&self) -> Option<(T, T)> {
        (self.rank > 0).then(|| (self.sigmas[0], self.sigmas[self.rank - 1]))
    }

    /// Assembles `U·Σ·Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let (m, n) = self.shape();
        let mut a = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                a[(i, j)] = self
                    .sigmas
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (k, &s)| acc + self.u[(i, k)] * s * self.v[(j, k)]);
            }
        }
        a
    }

    /// `U₁ᵀ·w` for an m-vector.
    pub fn left_range_coords(&self, w: &[T]) -> Vector<T> {
        project_onto(&self.u, 0..self.rank, w)
    }

    /// `U₂ᵀ·w` for an m-vector (left null space, i.e. null space of Aᵀ).
    pub fn left_null_coords(&self, w: &[T]) -> Vector<T> {
        project_onto(&self.u, self.rank..self.u.cols(), w)
    }

    /// `V₁ᵀ·x` for an n-vector.
    pub fn right_range_coords(&self, x: &[T]) -> Vector<T> {
        project_onto(&self.v, 0..self.rank, x)
    }

    /// `V₂ᵀ·x` for an n-vector (null space of A).
    pub fn right_null_coords(&self, x: &[T]) -> Vector<T> {
        project_onto(&self.v, self.rank..self.v.cols(), x)
    }

    pub(crate) fn right_combine(&self, coeffs: &[T]) -> Vector<T> {
        combine_columns(&self.v, 0..self.rank, coeffs)
    }
}

/// Singular value decomposition of any real m×n matrix.
///
/// Columns of a working copy of `A` are rotated pairwise until mutually
/// orthogonal; the rotations accumulate into `V` and the column norms are
/// the singular values. `U` takes the normalized columns above the noise
/// floor and is completed to an orthogonal basis by Gram–Schmidt on
/// coordinate vectors.
pub fn svd<T: Scalar>(a: &DenseMatrix<T>, rank_tol: T) -> Result<SingularDecomposition<T>> {
    if rank_tol.is_nan() || rank_tol <= T::zero() {
        return Err(Error::InvalidInput("rank_tol must be positive".into()));
    }
    let (m, n) = a.shape();
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j).into_vec()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let orth_tol = T::epsilon() * T::lit(m.max(1) as f64);
    // columns this small are rounding noise; rotating them never settles
    let noise = T::epsilon() * T::lit(m.max(n) as f64) * a.frobenius_norm();
    let noise_sq = noise * noise;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if alpha <= noise_sq
                    || beta <= noise_sq
                    || gamma.abs() <= orth_tol * (alpha * beta).sqrt()
                    || gamma.abs() < T::min_positive_value()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            method: "one-sided jacobi svd",
            sweeps: MAX_SWEEPS,
        });
    }

    let norms: Vec<T> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite column norms"));

    let k = m.min(n);
    let sigmas: Vec<T> = order[..k].iter().map(|&j| norms[j]).collect();
    let rank = numerical_rank(&sigmas, rank_tol);

    let mut v_out = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        v_out.set_column(dst, &v[src]);
    }

    // Columns of AV carry a direction of U only while they stand above the
    // rounding noise that the rotations ignored; below that U is filled in by
    // completion. Reorthogonalizing in descending order keeps the leading
    // columns exact and repairs the eps·σ₁/σⱼ drift of the small ones.
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(m);
    for (idx, &src) in order[..k].iter().enumerate() {
        let s = sigmas[idx];
        if s.is_nan() || s <= noise {
            break;
        }
        let mut col: Vec<T> = w[src].iter().map(|&x| x / s).collect();
        for _ in 0..2 {
            for b in &basis {
                let h = dot(b, &col);
                for (c, &bi) in col.iter_mut().zip(b) {
                    *c -= h * bi;
                }
            }
        }
        let norm = dot(&col, &col).sqrt();
        if norm < T::lit(0.5) {
            break;
        }
        col.iter_mut().for_each(|c| *c /= norm);
        basis.push(col);
    }
    complete_orthonormal(&mut basis, m);

    let mut u = DenseMatrix::zeros(m, m);
    for (j, col) in basis.iter().enumerate() {
        u.set_column(j, col);
    }
    Ok(SingularDecomposition {
        u,
        sigmas,
        v: v_out,
        rank,
        rank_tol,
    })
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let g = *x;
        let h = *y;
        *x = c * g - s * h;
        *y = s * g + c * h;
    }
}

/// Extends orthonormal columns of length `m` to a full basis of ℝᵐ using
/// coordinate vectors, orthogonalized twice against the current basis.
pub(crate) fn complete_orthonormal<T: Scalar>(basis: &mut Vec<Vec<T>>, m: usize) {
    let accept = T::lit(1e-3);
    for e in 0..m {
        if basis.len() == m {
            return;
        }
        let mut x = vec![T::zero(); m];
        x[e] = T::one();
        for _ in 0..2 {
            for b in basis.iter() {
                let h = dot(b, &x);
                for (xi, &bi) in x.iter_mut().zip(b) {
                    *xi -= h * bi;
                }
            }
        }
        let norm = dot(&x, &x).sqrt();
        if norm > accept {
            basis.push(x.into_iter().map(|xi| xi / norm).collect());
        }
    }
    debug_assert_eq!(basis.len(), m, "coordinate completion must span ℝᵐ");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::{symmetric_eig, DEFAULT_RANK_TOL};
    use proptest::prelude::*;

    fn orthogonality_error(q: &DenseMatrix<f64>) -> f64 {
        let qtq = q.transpose().matmul(q).unwrap();
        qtq.sub(&DenseMatrix::identity(q.cols())).unwrap().max_abs()
    }

    fn check_invariants(a: &DenseMatrix<f64>, d: &SingularDecomposition<f64>) {
        assert!(orthogonality_error(&d.u) <= 1e-12, "U not orthogonal");
        assert!(orthogonality_error(&d.v) <= 1e-12, "V not orthogonal");
        let recon = d.reconstruct().sub(a).unwrap().frobenius_norm();
        assert!(recon <= 1e-10 * a.frobenius_norm().max(f64::MIN_POSITIVE));
        assert!(d.sigmas.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(d.sigmas.len(), a.rows().min(a.cols()));
    }

    #[test]
    fn identity() {
        let a = DenseMatrix::<f64>::identity(2);
        let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.sigmas, vec![1.0, 1.0]);
        assert_eq!(d.rank, 2);
        check_invariants(&a, &d);
    }

    #[test]
    fn single_unit_column() {
        let a = DenseMatrix::<f64>::from_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.sigmas, vec![1.0, 0.0]);
        assert_eq!(d.rank, 1);
        check_invariants(&a, &d);
    }

    #[test]
    fn tall_diagonal() {
        // AᵀA = diag(4, 1)
        let a = DenseMatrix::<f64>::from_rows(&[&[2.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.sigmas, vec![2.0, 1.0]);
        assert_eq!(d.rank, 2);
        assert_eq!(d.extreme_sigmas(), Some((2.0, 1.0)));
        check_invariants(&a, &d);
    }

    #[test]
    fn wide_and_zero_matrices() {
        let a = DenseMatrix::<f64>::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.sigmas, vec![1.0, 0.0]);
        assert_eq!(d.rank, 1);
        check_invariants(&a, &d);

        let z = DenseMatrix::<f64>::zeros(3, 2);
        let d = svd(&z, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.rank, 0);
        assert_eq!(d.extreme_sigmas(), None);
        check_invariants(&z, &d);
    }

    #[test]
    fn single_precision() {
        let a = DenseMatrix::<f32>::from_rows(&[&[2.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let d = svd(&a, f32::tol(1e-10)).unwrap();
        assert!((d.sigmas[0] - 2.0).abs() < 1e-6);
        assert!((d.sigmas[1] - 1.0).abs() < 1e-6);
    }

    fn rect_strategy() -> impl Strategy<Value = DenseMatrix<f64>> {
        (1usize..10, 1usize..10, 0usize..3).prop_flat_map(|(m, n, deficiency)| {
            prop::collection::vec(-3.0f64..3.0, m * n).prop_map(move |entries| {
                let mut a = DenseMatrix::from_row_major(m, n, entries).unwrap();
                // duplicate leading columns to force rank deficiency
                for j in 1..=deficiency.min(n - 1) {
                    let c = a.column(0);
                    a.set_column(j, &c);
                }
                a
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_invariants(a in rect_strategy()) {
            let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
            check_invariants(&a, &d);
        }

        #[test]
        fn squares_match_gram_eigenvalues(a in rect_strategy()) {
            let d = svd(&a, DEFAULT_RANK_TOL).unwrap();
            let gram = a.transpose().matmul(&a).unwrap();
            let e = symmetric_eig(&gram, DEFAULT_RANK_TOL).unwrap();
            let s1 = d.sigmas[0];
            for (i, &s) in d.sigmas.iter().enumerate() {
                prop_assert!((s * s - e.lambdas[i]).abs() <= 1e-9 * (s1 * s1).max(f64::MIN_POSITIVE));
            }
        }
    }
}
