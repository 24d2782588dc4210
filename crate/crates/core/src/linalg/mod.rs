//! Dense kernels and the spectral decompositions every diagnostic relies on.

mod dense;
mod eigen;
mod svd;

pub use dense::{matvec, DenseMatrix, Vector};
pub use eigen::{symmetric_eig, SpectralDecomposition, DEFAULT_RANK_TOL, MAX_SWEEPS};
pub use svd::{svd, SingularDecomposition};

pub(crate) use dense::dot;
pub(crate) use eigen::{combine_columns, project_onto};
pub(crate) use svd::complete_orthonormal;
