//! Geometric convergence bounds, evaluated against measured traces.
//!
//! All three bounds have the form `measured[k] ≤ 2·ρᵏ·measured[0]`:
//!
//! | kind                   | measured quantity           | ρ                       |
//! |------------------------|-----------------------------|-------------------------|
//! | `CgEnergy`             | `√(r¹ₖᵀ Λr⁻¹ r¹ₖ)`          | `(√κ − 1)/(√κ + 1)`     |
//! | `CglsRangeResidual`    | `‖A(xₖ − x*)‖₂`             | `(σ₁ − σ_r)/(σ₁ + σ_r)` |
//! | `CgneEnergy`           | `rₖᵀ (AAᵀ)† rₖ`             | `(σ₁ − σ_r)/(σ₁ + σ_r)` |
//!
//! A value counts as a violation only when it exceeds
//! `bound[k]·(1 + 1e-6) + 1e-13·measured[0]`, and checking stops once
//! `measured[k] < 1e-12·measured[0]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SingularDecomposition, SpectralDecomposition, Vector};
use crate::oracle::{consistency_check, consistency_check_rect, split, DEFAULT_CONSISTENCY_TOL};
use crate::scalar::Scalar;
use crate::solvers::{Method, SolveTrace};

pub const BOUND_REL_SLACK: f64 = 1e-6;
pub const BOUND_ABS_FLOOR: f64 = 1e-13;
pub const BOUND_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    CgEnergy,
    CglsRangeResidual,
    CgneEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralData<T> {
    Eigen { lambda_max: T, lambda_min: T, kappa: T },
    Singular { sigma_max: T, sigma_min: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<T> {
    pub iteration: usize,
    pub measured: T,
    pub bound: T,
}

#[derive(Debug, Clone)]
pub struct BoundReport<T> {
    pub kind: BoundKind,
    pub measured: Vec<T>,
    pub bound: Vec<T>,
    pub contraction_factor: T,
    pub kappa_or_sigmas: SpectralData<T>,
    pub violations: Vec<Violation<T>>,
    pub pass: bool,
}

/// `(√κ − 1)/(√κ + 1)`.
pub fn cg_contraction_factor<T: Scalar>(kappa: T) -> T {
    let s = kappa.sqrt();
    (s - T::one()) / (s + T::one())
}

/// `(σ₁ − σ_r)/(σ₁ + σ_r)`.
pub fn normal_contraction_factor<T: Scalar>(sigma_max: T, sigma_min: T) -> T {
    (sigma_max - sigma_min) / (sigma_max + sigma_min)
}

fn assemble<T: Scalar>(kind: BoundKind, measured: Vec<T>, rho: T, spectral: SpectralData<T>) -> BoundReport<T> {
    let m0 = measured.first().copied().unwrap_or(T::zero());
    let two = T::lit(2.0);
    let bound: Vec<T> = (0..measured.len()).map(|k| two * rho.powi(k as i32) * m0).collect();
    let rel = T::one() + T::lit(BOUND_REL_SLACK);
    let floor = T::lit(BOUND_ABS_FLOOR) * m0;
    let cutoff = T::lit(BOUND_CUTOFF) * m0;

    let mut violations = Vec::new();
    for (k, (&m, &b)) in measured.iter().zip(&bound).enumerate() {
        if m < cutoff {
            break;
        }
        if m > b * rel + floor {
            violations.push(Violation {
                iteration: k,
                measured: m,
                bound: b,
            });
        }
    }
    BoundReport {
        kind,
        measured,
        bound,
        contraction_factor: rho,
        kappa_or_sigmas: spectral,
        pass: violations.is_empty(),
        violations,
    }
}

fn expect_method<T>(trace: &SolveTrace<T>, method: Method) -> Result<()> {
    if trace.method != method {
        return Err(Error::InvalidInput(format!(
            "expected a {method} trace, got {}",
            trace.method
        )));
    }
    Ok(())
}

/// `‖r¹‖_{Λr⁻¹} = √(r¹ᵀ Λr⁻¹ r¹)` with `r¹ = Q₁ᵀr`.
pub fn range_energy_norm<T: Scalar>(decomp: &SpectralDecomposition<T>, r: &Vector<T>) -> Result<T> {
    let r1 = split(decomp, r)?.range_part;
    Ok(r1
        .iter()
        .zip(decomp.range_lambdas())
        .fold(T::zero(), |acc, (&c, &l)| acc + c * c / l)
        .sqrt())
}

/// Energy-norm bound for CG on a consistent singular system.
pub fn cg_bound_verify<T: Scalar>(trace: &SolveTrace<T>, decomp: &SpectralDecomposition<T>) -> Result<BoundReport<T>> {
    expect_method(trace, Method::Cg)?;
    trace.require_recorded()?;
    let tol = T::tol(DEFAULT_CONSISTENCY_TOL);
    let consistency = consistency_check(decomp, &trace.rhs, tol)?;
    if !consistency.consistent {
        return Err(Error::Inconsistent {
            null_norm: consistency.null_norm.to_f64_lossy(),
            threshold: (tol * trace.rhs.norm().max(T::one())).to_f64_lossy(),
        });
    }
    let kappa = decomp.condition_number().ok_or(Error::ZeroRank)?;
    let measured = trace
        .residuals
        .iter()
        .map(|r| range_energy_norm(decomp, r))
        .collect::<Result<Vec<_>>>()?;
    let spectral = SpectralData::Eigen {
        lambda_max: decomp.lambdas[0],
        lambda_min: decomp.lambdas[decomp.rank - 1],
        kappa,
    };
    Ok(assemble(
        BoundKind::CgEnergy,
        measured,
        cg_contraction_factor(kappa),
        spectral,
    ))
}

/// `‖A(xₖ − x*)‖₂` bound for CGLS.
pub fn cgls_bound_verify<T: Scalar>(
    trace: &SolveTrace<T>,
    sdec: &SingularDecomposition<T>,
    xstar: &Vector<T>,
) -> Result<BoundReport<T>> {
    expect_method(trace, Method::Cgls)?;
    trace.require_recorded()?;
    let (sigma_max, sigma_min) = sdec.extreme_sigmas().ok_or(Error::ZeroRank)?;
    if xstar.len() != sdec.shape().1 {
        return Err(Error::dims("cgls_bound_verify xstar", sdec.shape().1, xstar.len()));
    }
    let measured = trace
        .iterates
        .iter()
        .map(|x| {
            let coords = sdec.right_range_coords(&x.sub(xstar));
            coords
                .iter()
                .zip(sdec.range_sigmas())
                .fold(T::zero(), |acc, (&c, &s)| acc + (s * c) * (s * c))
                .sqrt()
        })
        .collect();
    Ok(assemble(
        BoundKind::CglsRangeResidual,
        measured,
        normal_contraction_factor(sigma_max, sigma_min),
        SpectralData::Singular { sigma_max, sigma_min },
    ))
}

/// `rₖᵀ(AAᵀ)†rₖ` bound for CGNE, applied to the quadratic form itself.
pub fn cgne_bound_verify<T: Scalar>(trace: &SolveTrace<T>, sdec: &SingularDecomposition<T>) -> Result<BoundReport<T>> {
    expect_method(trace, Method::Cgne)?;
    trace.require_recorded()?;
    let tol = T::tol(DEFAULT_CONSISTENCY_TOL);
    let consistency = consistency_check_rect(sdec, &trace.rhs, tol)?;
    if !consistency.consistent {
        return Err(Error::Inconsistent {
            null_norm: consistency.null_norm.to_f64_lossy(),
            threshold: (tol * trace.rhs.norm().max(T::one())).to_f64_lossy(),
        });
    }
    let (sigma_max, sigma_min) = sdec.extreme_sigmas().ok_or(Error::ZeroRank)?;
    let measured = trace
        .residuals
        .iter()
        .map(|r| {
            sdec.left_range_coords(r)
                .iter()
                .zip(sdec.range_sigmas())
                .fold(T::zero(), |acc, (&c, &s)| acc + (c / s) * (c / s))
        })
        .collect();
    Ok(assemble(
        BoundKind::CgneEnergy,
        measured,
        normal_contraction_factor(sigma_max, sigma_min),
        SpectralData::Singular { sigma_max, sigma_min },
    ))
}
