use crate::error::Result;
use crate::linalg::{matvec, DenseMatrix, Vector};
use crate::scalar::Scalar;
use crate::solvers::{check_len, run_cg, Method, SolveTrace, SolverConfig};

/// CGNE: the CG recurrence on `AAᵀ·y = b` with `x = Aᵀy`.
///
/// `AAᵀ` is applied as `A·(Aᵀp)`. Stopping follows [`cg_solve`](super::cg_solve)
/// with residual `rᵢ = b − AAᵀyᵢ`.
pub fn cgne_solve<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    y0: &Vector<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveTrace<T>> {
    check_len("cgne_solve rhs", a.rows(), b.len())?;
    check_len("cgne_solve y0", a.rows(), y0.len())?;
    let max_iters = cfg.validate(a.rows())?;
    let aat = |y: &Vector<T>| -> Vector<T> {
        let w = a.tr_matvec(y).expect("dimensions checked");
        matvec(a, &w).expect("dimensions checked")
    };
    let r0 = b.sub(&aat(y0));
    let mut trace = run_cg(Method::Cgne, b, y0, r0, cfg, max_iters, aat);

    trace.y_iterates = std::mem::take(&mut trace.iterates);
    trace.iterates = trace.y_iterates.iter().map(|y| a.tr_matvec(y)).collect::<Result<_>>()?;
    let y = std::mem::replace(&mut trace.solution, Vector::zeros(0));
    trace.solution = a.tr_matvec(&y)?;
    trace.y_solution = Some(y);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd, DEFAULT_RANK_TOL};
    use crate::oracle::pinv_apply_rect;
    use crate::solvers::StopReason;

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x)
    }

    #[test]
    fn singular_gram_matches_pseudoinverse() {
        // AAᵀ = diag(1, 0), b = (1, 0) consistent
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b = v(&[1.0, 0.0]);
        let t = cgne_solve(&a, &b, &Vector::zeros(2), &SolverConfig::default()).unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        let sdec = svd(&a, DEFAULT_RANK_TOL).unwrap();
        let xstar = pinv_apply_rect(&sdec, &b).unwrap();
        assert_eq!(xstar.as_slice(), &[1.0, 0.0, 0.0]);
        assert!(t.solution.sub(&xstar).max_abs() < 1e-15);
    }

    #[test]
    fn identity() {
        let a = DenseMatrix::identity(2);
        let t = cgne_solve(&a, &v(&[1.0, 1.0]), &Vector::zeros(2), &SolverConfig::default()).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.y_solution.as_ref().unwrap().as_slice(), &[1.0, 1.0]);
        assert_eq!(t.solution.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn single_row_min_norm() {
        // AAᵀ = [1]; min-norm solution of x₁ = 2 is (2, 0)
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0]]);
        let t = cgne_solve(&a, &v(&[2.0]), &Vector::zeros(1), &SolverConfig::default()).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.y_solution.as_ref().unwrap().as_slice(), &[2.0]);
        assert_eq!(t.solution.as_slice(), &[2.0, 0.0]);
        assert_eq!(t.y_iterates.len(), 2);
        assert_eq!(t.iterates[1].as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn dimension_checks() {
        let a = DenseMatrix::<f64>::zeros(2, 3);
        let cfg = SolverConfig::default();
        assert!(cgne_solve(&a, &Vector::zeros(3), &Vector::zeros(2), &cfg).is_err());
        assert!(cgne_solve(&a, &Vector::zeros(2), &Vector::zeros(3), &cfg).is_err());
    }
}
