//! CG carried out in the eigenbasis of `A`.
//!
//! With `Q = [Q₁, Q₂]` and `v¹ = Q₁ᵀv`, `v² = Q₂ᵀv`, the CG recurrence on a
//! symmetric positive semidefinite system separates into a range part that
//! only sees `Λr` and a null part that never changes the residual:
//!
//! ```text
//! r¹₀ = b¹ − Λr·x¹₀              r²₀ = b²
//! p¹₀ = r¹₀                      p²₀ = b²
//! αᵢ = ((r¹ᵢ, r¹ᵢ) + (b², b²)) / (p¹ᵢ, Λr·p¹ᵢ)
//! x¹ᵢ₊₁ = x¹ᵢ + αᵢ·p¹ᵢ            x²ᵢ₊₁ = x²ᵢ + αᵢ·p²ᵢ
//! r¹ᵢ₊₁ = r¹ᵢ − αᵢ·Λr·p¹ᵢ         r²ᵢ₊₁ = b²
//! βᵢ = ((r¹ᵢ₊₁, r¹ᵢ₊₁) + (b², b²)) / ((r¹ᵢ, r¹ᵢ) + (b², b²))
//! p¹ᵢ₊₁ = r¹ᵢ₊₁ + βᵢ·p¹ᵢ          p²ᵢ₊₁ = b² + βᵢ·p²ᵢ
//! ```
//!
//! When `b² = 0` the null part is frozen: `p²ᵢ = 0` and `x²ᵢ = x²₀`.

use crate::error::{Error, Result};
use crate::linalg::{SpectralDecomposition, Vector};
use crate::oracle::{consistency_check, split};
use crate::scalar::Scalar;
use crate::solvers::{Method, SolveTrace, StopReason, DEFAULT_BREAKDOWN_TOL};

/// [`equivalence_check`] stops once `‖r¹ᵢ‖₂` falls below this fraction of
/// `‖b¹‖₂`.
pub const ROUNDING_HORIZON: f64 = 1e-12;

/// [`equivalence_check`] also stops at the first residual whose cosine with
/// an earlier residual, times the largest growth `‖rⱼ‖/‖r₀‖` so far, exceeds
/// this. Past that point finite precision CG has left the exact recurrence,
/// and rounding differences between equivalent implementations grow
/// exponentially. The growth factor matters on inconsistent systems, where
/// the iterate diverges and amplifies earlier rounding.
pub const ORTHOGONALITY_HORIZON: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct DecomposedTrace<T> {
    pub x1: Vec<Vector<T>>,
    pub r1: Vec<Vector<T>>,
    pub p1: Vec<Vector<T>>,
    pub x2: Vec<Vector<T>>,
    pub r2: Vec<Vector<T>>,
    pub p2: Vec<Vector<T>>,
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub b1: Vector<T>,
    pub b2: Vector<T>,
    pub stop_reason: StopReason,
}

impl<T: Scalar> DecomposedTrace<T> {
    pub fn iterations(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_consistent_case(&self) -> bool {
        self.b2.iter().all(|&v| v == T::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport<T> {
    pub max_deviation: T,
    pub iterations_compared: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementReport<T> {
    /// Largest sine of the angle between `p²ᵢ` and `b²`.
    pub max_angle: T,
    pub pass: bool,
}

/// Runs the general-case decomposed recurrence for at most `iters` steps.
pub fn decomposed_cg_run<T: Scalar>(
    decomp: &SpectralDecomposition<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    iters: usize,
) -> Result<DecomposedTrace<T>> {
    let bs = split(decomp, b)?;
    let xs = split(decomp, x0)?;
    Ok(run(
        decomp.range_lambdas(),
        bs.range_part,
        bs.null_part,
        xs.range_part,
        xs.null_part,
        iters,
    ))
}

/// Runs the consistent-case recurrence (`b² = 0`, so `r²ᵢ = p²ᵢ = 0`).
///
/// Fails with [`Error::Inconsistent`] when `‖Q₂ᵀb‖₂ > tol·max(‖b‖₂, 1)`;
/// otherwise the null part of `b` is dropped exactly.
pub fn decomposed_cg_run_consistent<T: Scalar>(
    decomp: &SpectralDecomposition<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    iters: usize,
    tol: T,
) -> Result<DecomposedTrace<T>> {
    let report = consistency_check(decomp, b, tol)?;
    if !report.consistent {
        return Err(Error::Inconsistent {
            null_norm: report.null_norm.to_f64_lossy(),
            threshold: (tol * b.norm().max(T::one())).to_f64_lossy(),
        });
    }
    let bs = split(decomp, b)?;
    let xs = split(decomp, x0)?;
    let b2 = Vector::zeros(bs.null_part.len());
    Ok(run(
        decomp.range_lambdas(),
        bs.range_part,
        b2,
        xs.range_part,
        xs.null_part,
        iters,
    ))
}

fn run<T: Scalar>(
    lambdas: &[T],
    b1: Vector<T>,
    b2: Vector<T>,
    x1_0: Vector<T>,
    x2_0: Vector<T>,
    iters: usize,
) -> DecomposedTrace<T> {
    let breakdown_tol = T::tol(DEFAULT_BREAKDOWN_TOL);
    let scale = |v: &Vector<T>| -> Vector<T> { v.iter().zip(lambdas).map(|(&x, &l)| l * x).collect() };

    let mut x1 = x1_0;
    let mut x2 = x2_0;
    let mut r1 = b1.sub(&scale(&x1));
    let mut p1 = r1.clone();
    let mut p2 = b2.clone();
    let bb2 = b2.norm_sq();

    let mut t = DecomposedTrace {
        x1: vec![x1.clone()],
        r1: vec![r1.clone()],
        p1: vec![p1.clone()],
        x2: vec![x2.clone()],
        r2: vec![b2.clone()],
        p2: vec![p2.clone()],
        alphas: Vec::new(),
        betas: Vec::new(),
        b1,
        b2,
        stop_reason: StopReason::MaxIters,
    };

    for _ in 0..iters {
        let num = r1.norm_sq() + bb2;
        if num == T::zero() {
            t.stop_reason = StopReason::Converged;
            break;
        }
        let lp = scale(&p1);
        let curvature = lp.dot(&p1);
        if curvature <= breakdown_tol * (p1.norm_sq() + p2.norm_sq()) {
            t.stop_reason = StopReason::Breakdown;
            break;
        }
        let alpha = num / curvature;
        x1 = x1.add_scaled(alpha, &p1);
        x2 = x2.add_scaled(alpha, &p2);
        r1 = r1.add_scaled(-alpha, &lp);
        let beta = (r1.norm_sq() + bb2) / num;
        p1 = r1.add_scaled(beta, &p1);
        p2 = t.b2.add_scaled(beta, &p2);

        t.alphas.push(alpha);
        t.betas.push(beta);
        t.x1.push(x1.clone());
        t.r1.push(r1.clone());
        t.p1.push(p1.clone());
        t.x2.push(x2.clone());
        t.r2.push(t.b2.clone());
        t.p2.push(p2.clone());
    }
    t
}

fn vec_deviation<T: Scalar>(value: &Vector<T>, reference: &Vector<T>) -> T {
    value.sub(reference).norm() / reference.norm().max(T::one())
}

fn scalar_deviation<T: Scalar>(value: T, reference: T) -> T {
    (value - reference).abs() / reference.abs().max(T::min_positive_value())
}

enum Horizon {
    Residual(usize),
    Orthogonality(usize),
    None,
}

/// First state `h ≥ 1` of the reference trace past which the comparison is
/// meaningless. Residuals are taken as `(r¹ᵢ, r²ᵢ)`, which has the inner
/// products of `rᵢ`.
fn horizon<T: Scalar>(dtrace: &DecomposedTrace<T>, states: usize) -> Horizon {
    let level = T::lit(ROUNDING_HORIZON) * dtrace.b1.norm();
    let limit = T::lit(ORTHOGONALITY_HORIZON);
    let norms: Vec<T> = (0..states)
        .map(|i| (dtrace.r1[i].norm_sq() + dtrace.r2[i].norm_sq()).sqrt())
        .collect();
    let mut growth = T::one();
    for i in 1..states {
        if dtrace.r1[i].norm() < level {
            return Horizon::Residual(i);
        }
        if norms[0] > T::zero() {
            growth = growth.max(norms[i] / norms[0]);
        }
        for j in 0..i {
            let scale = norms[i] * norms[j];
            if scale == T::zero() {
                continue;
            }
            let inner = dtrace.r1[i].dot(&dtrace.r1[j]) + dtrace.r2[i].dot(&dtrace.r2[j]);
            if (inner / scale).abs() * growth > limit {
                return Horizon::Orthogonality(i);
            }
        }
    }
    Horizon::None
}

/// Compares a plain CG trace, rotated into the eigenbasis of `decomp`, with a
/// decomposed trace of the same problem, up to the rounding horizon (see
/// [`ROUNDING_HORIZON`] and [`ORTHOGONALITY_HORIZON`]).
pub fn equivalence_check<T: Scalar>(
    trace: &SolveTrace<T>,
    dtrace: &DecomposedTrace<T>,
    decomp: &SpectralDecomposition<T>,
    tol: T,
) -> Result<EquivalenceReport<T>> {
    if trace.method != Method::Cg {
        return Err(Error::InvalidInput(format!(
            "equivalence_check expects a cg trace, got {}",
            trace.method
        )));
    }
    let states = trace.iterates.len().min(dtrace.x1.len());
    if states == 0 {
        return Err(Error::InvalidInput("no comparable iterations".into()));
    }
    let (last, beta_count) = match horizon(dtrace, states) {
        // state h is still accurate in absolute terms; βₕ₋₁ divides noise by noise
        Horizon::Residual(h) => (h, h - 1),
        Horizon::Orthogonality(h) => (h - 1, h - 1),
        Horizon::None => (states - 1, states - 1),
    };

    let mut worst = T::zero();
    for i in 0..=last {
        let x = split(decomp, &trace.iterates[i])?;
        let r = split(decomp, &trace.residuals[i])?;
        let p = split(decomp, &trace.directions[i])?;
        for (value, reference) in [
            (&x.range_part, &dtrace.x1[i]),
            (&x.null_part, &dtrace.x2[i]),
            (&r.range_part, &dtrace.r1[i]),
            (&r.null_part, &dtrace.r2[i]),
            (&p.range_part, &dtrace.p1[i]),
            (&p.null_part, &dtrace.p2[i]),
        ] {
            worst = worst.max(vec_deviation(value, reference));
        }
    }
    let scalars = last.min(trace.alphas.len()).min(dtrace.alphas.len());
    for i in 0..scalars {
        worst = worst.max(scalar_deviation(trace.alphas[i], dtrace.alphas[i]));
    }
    for i in 0..beta_count.min(scalars) {
        worst = worst.max(scalar_deviation(trace.betas[i], dtrace.betas[i]));
    }
    Ok(EquivalenceReport {
        max_deviation: worst,
        iterations_compared: last + 1,
        pass: worst <= tol,
    })
}

/// Checks that every `p²ᵢ` stays parallel to `b²`.
pub fn null_direction_confinement<T: Scalar>(dtrace: &DecomposedTrace<T>, tol: T) -> Result<ConfinementReport<T>> {
    let b2_norm = dtrace.b2.norm();
    if b2_norm == T::zero() {
        return Err(Error::InvalidInput(
            "b2 = 0: consistent case has p2 = 0 and x2 = x2_0; check those instead".into(),
        ));
    }
    let unit = dtrace.b2.scaled(b2_norm.recip());
    let mut worst = T::zero();
    for p2 in &dtrace.p2 {
        let norm = p2.norm();
        if norm <= tol * b2_norm {
            continue;
        }
        let perp = p2.add_scaled(-p2.dot(&unit), &unit);
        worst = worst.max(perp.norm() / norm);
    }
    Ok(ConfinementReport {
        max_angle: worst,
        pass: worst <= tol,
    })
}

/// `maxᵢ ‖Q₂ᵀrᵢ − Q₂ᵀb‖₂ / max(‖Q₂ᵀb‖₂, 1)` over a recorded CG trace.
pub fn null_residual_deviation<T: Scalar>(trace: &SolveTrace<T>, decomp: &SpectralDecomposition<T>) -> Result<T> {
    trace.require_recorded()?;
    let b2 = split(decomp, &trace.rhs)?.null_part;
    let denom = b2.norm().max(T::one());
    trace.residuals.iter().try_fold(T::zero(), |worst, r| {
        let r2 = split(decomp, r)?.null_part;
        Ok(worst.max(r2.sub(&b2).norm() / denom))
    })
}

/// `maxᵢ ‖Q₂ᵀxᵢ − Q₂ᵀx₀‖₂ / max(‖Q₂ᵀx₀‖₂, 1)` over a recorded trace.
pub fn null_iterate_deviation<T: Scalar>(trace: &SolveTrace<T>, decomp: &SpectralDecomposition<T>) -> Result<T> {
    trace.require_recorded()?;
    let x2_0 = split(decomp, &trace.iterates[0])?.null_part;
    let denom = x2_0.norm().max(T::one());
    trace.iterates.iter().try_fold(T::zero(), |worst, x| {
        let x2 = split(decomp, x)?.null_part;
        Ok(worst.max(x2.sub(&x2_0).norm() / denom))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{symmetric_eig, DenseMatrix, DEFAULT_RANK_TOL};
    use crate::solvers::{cg_solve, SolverConfig};

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x)
    }

    fn eig(diag: &[f64]) -> SpectralDecomposition<f64> {
        symmetric_eig(&DenseMatrix::from_diag(diag), DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn consistent_diagonal_matches_plain_cg() {
        let d = eig(&[2.0, 1.0, 0.0]);
        let b = v(&[2.0, 1.0, 0.0]);
        let dt = decomposed_cg_run(&d, &b, &Vector::zeros(3), 2).unwrap();
        assert_eq!(dt.iterations(), 2);
        assert!(dt.x1[2].sub(&v(&[1.0, 1.0])).max_abs() < 1e-15);
        assert_eq!(dt.x2[2].as_slice(), &[0.0]);
        assert!((dt.alphas[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((dt.alphas[1] - 0.9).abs() < 1e-15);
        assert!((dt.betas[0] - 4.0 / 81.0).abs() < 1e-15);

        let t = cg_solve(
            &DenseMatrix::from_diag(&[2.0, 1.0, 0.0]),
            &b,
            &Vector::zeros(3),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(&t.alphas[..], &dt.alphas[..]);
        let rep = equivalence_check(&t, &dt, &d, 1e-10).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.iterations_compared >= 2);
    }

    #[test]
    fn pure_null_rhs_breaks_down() {
        let d = eig(&[2.0, 1.0, 0.0]);
        let dt = decomposed_cg_run(&d, &v(&[0.0, 0.0, 1.0]), &Vector::zeros(3), 5).unwrap();
        assert_eq!(dt.b1.as_slice(), &[0.0, 0.0]);
        assert_eq!(dt.b2.as_slice(), &[1.0]);
        assert_eq!(dt.p2[0].as_slice(), &[1.0]);
        assert_eq!(dt.stop_reason, StopReason::Breakdown);
        assert_eq!(dt.iterations(), 0);
    }

    #[test]
    fn general_case_keeps_null_residual() {
        let d = eig(&[1.0, 0.0]);
        let dt = decomposed_cg_run(&d, &v(&[1.0, 0.5]), &Vector::zeros(2), 3).unwrap();
        // α₀ = ((1) + 0.25) / 1
        assert!((dt.alphas[0] - 1.25).abs() < 1e-15);
        assert!(dt.r2.iter().all(|r| r.as_slice() == [0.5]));
        let rep = null_direction_confinement(&dt, 1e-8).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_angle, 0.0);
    }

    #[test]
    fn identical_traces_on_identity() {
        let a = DenseMatrix::<f64>::identity(2);
        let d = symmetric_eig(&a, DEFAULT_RANK_TOL).unwrap();
        let b = v(&[1.0, 1.0]);
        let t = cg_solve(&a, &b, &Vector::zeros(2), &SolverConfig::default()).unwrap();
        let dt = decomposed_cg_run(&d, &b, &Vector::zeros(2), 3).unwrap();
        let rep = equivalence_check(&t, &dt, &d, 1e-10).unwrap();
        assert_eq!(rep.max_deviation, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn perturbed_trace_fails() {
        let a = DenseMatrix::from_diag(&[2.0, 1.0, 0.0]);
        let d = eig(&[2.0, 1.0, 0.0]);
        let b = v(&[2.0, 1.0, 0.0]);
        let mut t = cg_solve(&a, &b, &Vector::zeros(3), &SolverConfig::default()).unwrap();
        let dt = decomposed_cg_run(&d, &b, &Vector::zeros(3), 2).unwrap();
        t.iterates[1] = t.iterates[1].add(&v(&[1.0, 0.0, 0.0]));
        let rep = equivalence_check(&t, &dt, &d, 1e-10).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_deviation >= 0.5);
    }

    #[test]
    fn equivalence_needs_recorded_cg_trace() {
        let a = DenseMatrix::from_diag(&[2.0, 1.0, 0.0]);
        let d = eig(&[2.0, 1.0, 0.0]);
        let b = v(&[2.0, 1.0, 0.0]);
        let cfg = SolverConfig::default().with_record_trace(false);
        let t = cg_solve(&a, &b, &Vector::zeros(3), &cfg).unwrap();
        let dt = decomposed_cg_run(&d, &b, &Vector::zeros(3), 2).unwrap();
        assert!(equivalence_check(&t, &dt, &d, 1e-10).is_err());
    }

    #[test]
    fn confinement_rejects_consistent_case() {
        let d = eig(&[2.0, 1.0, 0.0]);
        let dt = decomposed_cg_run(&d, &v(&[2.0, 1.0, 0.0]), &Vector::zeros(3), 2).unwrap();
        assert!(dt.is_consistent_case());
        assert!(null_direction_confinement(&dt, 1e-8).is_err());
    }

    #[test]
    fn consistent_runner_freezes_null_part() {
        let d = eig(&[3.0, 2.0, 0.0, 0.0]);
        let x0 = v(&[0.1, 0.2, 0.3, -0.4]);
        let dt = decomposed_cg_run_consistent(&d, &v(&[1.0, 1.0, 0.0, 0.0]), &x0, 4, 1e-10).unwrap();
        assert!(dt.p2.iter().all(|p| p.iter().all(|&x| x == 0.0)));
        assert!(dt.x2.iter().all(|x| x == &dt.x2[0]));
        assert!(decomposed_cg_run_consistent(&d, &v(&[1.0, 1.0, 1.0, 0.0]), &x0, 4, 1e-10).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let d = eig(&[2.0, 1.0, 0.0]);
        assert!(decomposed_cg_run(&d, &Vector::zeros(2), &Vector::zeros(3), 2).is_err());
    }
}
