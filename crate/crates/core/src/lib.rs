//! Conjugate gradient methods on singular symmetric positive semidefinite
//! systems and rank-deficient least squares problems.
//!
//! Besides the solvers (CG, CGLS, CGNE) the crate ships the machinery to
//! check what they do against spectral ground truth: an eigenbasis
//! decomposition of every CG iterate into range and null-space parts, the
//! Moore–Penrose pseudoinverse, and the geometric error bounds in terms of
//! `κ = λ₁/λ_r` or `σ₁, σ_r`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix double precision, which is what the default tolerances are
//! calibrated for.

pub mod bounds;
pub mod decomposition;
mod error;
pub mod genmat;
pub mod io;
pub mod linalg;
pub mod oracle;
mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use bounds::{cg_bound_verify, cgls_bound_verify, cgne_bound_verify, BoundKind, BoundReport};
pub use decomposition::{
    decomposed_cg_run, decomposed_cg_run_consistent, equivalence_check, null_direction_confinement, DecomposedTrace,
};
pub use genmat::{make_problem, random_orthogonal, Problem, ProblemKind, ProblemSpec, X0Mode};
pub use linalg::{matvec, svd, symmetric_eig, DenseMatrix, SingularDecomposition, SpectralDecomposition, Vector};
pub use oracle::{consistency_check, pinv_apply_rect, pseudoinverse_apply, split, SplitVector};
pub use solvers::{cg_solve, cgls_solve, cgne_solve, Method, SolveTrace, SolverConfig, StopReason};

pub type Matrix = DenseMatrix<f64>;
pub type Vec64 = Vector<f64>;
pub type Matrix32 = DenseMatrix<f32>;
pub type Vec32 = Vector<f32>;
pub type Spectral = SpectralDecomposition<f64>;
pub type Svd = SingularDecomposition<f64>;
pub type Config = SolverConfig<f64>;
pub type Trace = SolveTrace<f64>;
pub type Decomposed = DecomposedTrace<f64>;
pub type Bounds = BoundReport<f64>;
