use crate::error::Result;
use crate::linalg::{matvec, DenseMatrix, Vector};
use crate::scalar::Scalar;
use crate::solvers::{check_len, Method, SolveTrace, SolverConfig, StopReason};

/// Conjugate gradients on a symmetric positive semidefinite `A`.
///
/// ```text
/// r₀ = b − A·x₀,  p₀ = r₀
/// αᵢ = (rᵢ, rᵢ) / (A·pᵢ, pᵢ)
/// xᵢ₊₁ = xᵢ + αᵢ·pᵢ,  rᵢ₊₁ = rᵢ − αᵢ·A·pᵢ
/// βᵢ = (rᵢ₊₁, rᵢ₊₁) / (rᵢ, rᵢ),  pᵢ₊₁ = rᵢ₊₁ + βᵢ·pᵢ
/// ```
///
/// Stops on `‖rᵢ‖₂ ≤ rel_tol·max(‖b‖₂, 1)`, on the iteration cap, or with
/// [`StopReason::Breakdown`] once `(A·pᵢ, pᵢ) ≤ breakdown_tol·‖pᵢ‖₂²`.
pub fn cg_solve<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveTrace<T>> {
    a.check_symmetric()?;
    check_len("cg_solve rhs", a.rows(), b.len())?;
    check_len("cg_solve x0", a.cols(), x0.len())?;
    let max_iters = cfg.validate(a.cols())?;
    let r0 = b.sub(&matvec(a, x0)?);
    Ok(run_cg(Method::Cg, b, x0, r0, cfg, max_iters, |p| {
        matvec(a, p).expect("dimensions checked")
    }))
}

/// The plain CG recurrence on an abstract symmetric operator.
pub(crate) fn run_cg<T: Scalar>(
    method: Method,
    b: &Vector<T>,
    x0: &Vector<T>,
    r0: Vector<T>,
    cfg: &SolverConfig<T>,
    max_iters: usize,
    mut apply: impl FnMut(&Vector<T>) -> Vector<T>,
) -> SolveTrace<T> {
    let threshold = cfg.rel_tol * b.norm().max(T::one());
    let record = cfg.record_trace;

    let mut x = x0.clone();
    let mut r = r0;
    let mut p = r.clone();
    let mut rr = r.norm_sq();

    let mut trace = SolveTrace {
        method,
        rhs: b.clone(),
        iterates: Vec::new(),
        residuals: Vec::new(),
        directions: Vec::new(),
        alphas: Vec::new(),
        betas: Vec::new(),
        normal_residuals: Vec::new(),
        y_iterates: Vec::new(),
        residual_norms: vec![rr.sqrt()],
        normal_residual_norms: Vec::new(),
        solution: Vector::zeros(0),
        y_solution: None,
        stop_reason: StopReason::MaxIters,
    };
    if record {
        trace.iterates.push(x.clone());
        trace.residuals.push(r.clone());
        trace.directions.push(p.clone());
    }

    let mut iter = 0;
    let stop = loop {
        if rr.sqrt() <= threshold {
            break StopReason::Converged;
        }
        if iter == max_iters {
            break StopReason::MaxIters;
        }
        let ap = apply(&p);
        let curvature = ap.dot(&p);
        if curvature <= cfg.breakdown_tol * p.norm_sq() {
            break StopReason::Breakdown;
        }
        let alpha = rr / curvature;
        x = x.add_scaled(alpha, &p);
        r = r.add_scaled(-alpha, &ap);
        let rr_next = r.norm_sq();
        let beta = rr_next / rr;
        p = r.add_scaled(beta, &p);
        rr = rr_next;
        iter += 1;

        trace.alphas.push(alpha);
        trace.betas.push(beta);
        trace.residual_norms.push(rr.sqrt());
        if record {
            trace.iterates.push(x.clone());
            trace.residuals.push(r.clone());
            trace.directions.push(p.clone());
        }
    };
    trace.stop_reason = stop;
    trace.solution = x;
    trace
}
