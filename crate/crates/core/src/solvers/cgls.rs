use crate::error::Result;
use crate::linalg::{matvec, DenseMatrix, Vector};
use crate::scalar::Scalar;
use crate::solvers::{check_len, Method, SolveTrace, SolverConfig, StopReason};

/// CGLS (CG on `AᵀA·x = Aᵀb`, never forming `AᵀA`).
///
/// ```text
/// r₀ = b − A·x₀,  p₀ = s₀ = Aᵀr₀,  γ₀ = ‖s₀‖²
/// qᵢ = A·pᵢ,  αᵢ = γᵢ / ‖qᵢ‖²
/// xᵢ₊₁ = xᵢ + αᵢ·pᵢ,  rᵢ₊₁ = rᵢ − αᵢ·qᵢ
/// sᵢ₊₁ = Aᵀrᵢ₊₁,  γᵢ₊₁ = ‖sᵢ₊₁‖²,  βᵢ = γᵢ₊₁ / γᵢ
/// pᵢ₊₁ = sᵢ₊₁ + βᵢ·pᵢ
/// ```
///
/// Stops once `γᵢ ≤ (rel_tol·max(‖Aᵀb‖₂, 1))²`.
pub fn cgls_solve<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveTrace<T>> {
    check_len("cgls_solve rhs", a.rows(), b.len())?;
    check_len("cgls_solve x0", a.cols(), x0.len())?;
    let max_iters = cfg.validate(a.cols())?;
    let record = cfg.record_trace;

    let atb_norm = a.tr_matvec(b)?.norm();
    let threshold = cfg.rel_tol * atb_norm.max(T::one());
    let threshold_sq = threshold * threshold;

    let mut x = x0.clone();
    let mut r = b.sub(&matvec(a, x0)?);
    let mut s = a.tr_matvec(&r)?;
    let mut p = s.clone();
    let mut gamma = s.norm_sq();

    let mut trace = SolveTrace {
        method: Method::Cgls,
        rhs: b.clone(),
        iterates: Vec::new(),
        residuals: Vec::new(),
        directions: Vec::new(),
        alphas: Vec::new(),
        betas: Vec::new(),
        normal_residuals: Vec::new(),
        y_iterates: Vec::new(),
        residual_norms: vec![r.norm()],
        normal_residual_norms: vec![gamma.sqrt()],
        solution: Vector::zeros(0),
        y_solution: None,
        stop_reason: StopReason::MaxIters,
    };
    let push_state = |trace: &mut SolveTrace<T>, x: &Vector<T>, r: &Vector<T>, s: &Vector<T>, p: &Vector<T>| {
        trace.iterates.push(x.clone());
        trace.residuals.push(r.clone());
        trace.normal_residuals.push(s.clone());
        trace.directions.push(p.clone());
    };
    if record {
        push_state(&mut trace, &x, &r, &s, &p);
    }

    let mut iter = 0;
    let stop = loop {
        if gamma <= threshold_sq {
            break StopReason::Converged;
        }
        if iter == max_iters {
            break StopReason::MaxIters;
        }
        let q = matvec(a, &p)?;
        let qq = q.norm_sq();
        if qq <= cfg.breakdown_tol * p.norm_sq() {
            break StopReason::Breakdown;
        }
        let alpha = gamma / qq;
        x = x.add_scaled(alpha, &p);
        r = r.add_scaled(-alpha, &q);
        s = a.tr_matvec(&r)?;
        let gamma_next = s.norm_sq();
        let beta = gamma_next / gamma;
        p = s.add_scaled(beta, &p);
        gamma = gamma_next;
        iter += 1;

        trace.alphas.push(alpha);
        trace.betas.push(beta);
        trace.residual_norms.push(r.norm());
        trace.normal_residual_norms.push(gamma.sqrt());
        if record {
            push_state(&mut trace, &x, &r, &s, &p);
        }
    };
    trace.stop_reason = stop;
    trace.solution = x;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd, DEFAULT_RANK_TOL};
    use crate::oracle::pinv_apply_rect;

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x)
    }

    #[test]
    fn rank_one_single_step() {
        // s₀ = (1,0), q₀ = (1,0,0), α₀ = 1, x₁ = (1,0)
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let b = v(&[1.0, 1.0, 0.0]);
        let t = cgls_solve(&a, &b, &Vector::zeros(2), &SolverConfig::default()).unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.alphas[0], 1.0);
        assert_eq!(t.normal_residuals[0].as_slice(), &[1.0, 0.0]);
        assert_eq!(t.solution.as_slice(), &[1.0, 0.0]);
        let sdec = svd(&a, DEFAULT_RANK_TOL).unwrap();
        let xstar = pinv_apply_rect(&sdec, &b).unwrap();
        assert!(t.solution.sub(&xstar).max_abs() < 1e-15);
    }

    #[test]
    fn identity() {
        let a = DenseMatrix::identity(2);
        let t = cgls_solve(&a, &v(&[3.0, 4.0]), &Vector::zeros(2), &SolverConfig::default()).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.solution.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn zero_normal_residual_converges_immediately() {
        let a = DenseMatrix::from_rows(&[&[1.0], &[0.0]]);
        let t = cgls_solve(&a, &v(&[0.0, 1.0]), &Vector::zeros(1), &SolverConfig::default()).unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        assert_eq!(t.iterations(), 0);
        assert_eq!(t.solution.as_slice(), &[0.0]);
        assert_eq!(t.normal_residual_norms, vec![0.0]);
    }

    #[test]
    fn dimension_checks() {
        let a = DenseMatrix::<f64>::zeros(3, 2);
        let cfg = SolverConfig::default();
        assert!(cgls_solve(&a, &Vector::zeros(2), &Vector::zeros(2), &cfg).is_err());
        assert!(cgls_solve(&a, &Vector::zeros(3), &Vector::zeros(3), &cfg).is_err());
    }
}
