//! CG for symmetric positive semidefinite systems, and CGLS / CGNE for
//! rank-deficient least squares, each recording a full iteration trace.

mod cg;
mod cgls;
mod cgne;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

pub use cg::cg_solve;
pub(crate) use cg::run_cg;
pub use cgls::cgls_solve;
pub use cgne::cgne_solve;

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cg,
    Cgls,
    Cgne,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cg => "cg",
            Method::Cgls => "cgls",
            Method::Cgne => "cgne",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIters,
    Breakdown,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Converged => "converged",
            StopReason::MaxIters => "max_iters",
            StopReason::Breakdown => "breakdown",
        })
    }
}

/// Loop control. `max_iters = None` means ten times the number of unknowns.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<T> {
    pub max_iters: Option<usize>,
    pub rel_tol: T,
    pub breakdown_tol: T,
    pub record_trace: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            max_iters: None,
            rel_tol: T::tol(DEFAULT_REL_TOL),
            breakdown_tol: T::tol(DEFAULT_BREAKDOWN_TOL),
            record_trace: true,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = Some(max_iters);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_breakdown_tol(mut self, breakdown_tol: T) -> Self {
        self.breakdown_tol = breakdown_tol;
        self
    }

    pub fn with_record_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub(crate) fn validate(&self, unknowns: usize) -> Result<usize> {
        if [self.rel_tol, self.breakdown_tol]
            .iter()
            .any(|t| t.is_nan() || *t <= T::zero())
        {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        match self.max_iters {
            Some(0) => Err(Error::InvalidInput("max_iters must be at least 1".into())),
            Some(k) => Ok(k),
            None => Ok(10 * unknowns.max(1)),
        }
    }
}

/// Everything a solve produced.
///
/// Vector sequences are indexed by iteration and hold one more entry than
/// `alphas`; they stay empty when tracing was disabled. Scalar histories are
/// always filled. For CGNE, `iterates` holds `xᵢ = Aᵀyᵢ` and `y_iterates`
/// the iterates of the second-kind normal equation.
#[derive(Debug, Clone)]
pub struct SolveTrace<T> {
    pub method: Method,
    pub rhs: Vector<T>,
    pub iterates: Vec<Vector<T>>,
    pub residuals: Vec<Vector<T>>,
    pub directions: Vec<Vector<T>>,
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub normal_residuals: Vec<Vector<T>>,
    pub y_iterates: Vec<Vector<T>>,
    pub residual_norms: Vec<T>,
    pub normal_residual_norms: Vec<T>,
    pub solution: Vector<T>,
    pub y_solution: Option<Vector<T>>,
    pub stop_reason: StopReason,
}

impl<T: Scalar> SolveTrace<T> {
    /// Completed iterations.
    pub fn iterations(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_recorded(&self) -> bool {
        !self.iterates.is_empty()
    }

    pub fn final_residual_norm(&self) -> T {
        *self.residual_norms.last().expect("at least the initial residual")
    }

    pub(crate) fn require_recorded(&self) -> Result<()> {
        if self.is_recorded() {
            Ok(())
        } else {
            Err(Error::TraceNotRecorded)
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::dims(context, expected, found));
    }
    Ok(())
}
