//! File formats: Matrix Market matrices and vectors, JSON problem specs and
//! run reports.

mod mtx;
mod report;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

pub use mtx::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use report::{
    BoundSummary, Diagnostics, IterationScalars, OracleDistances, RunReport, SpectralSummary, REPORT_SCHEMA_VERSION,
};

use crate::error::Result;
use crate::genmat::ProblemSpec;
use crate::linalg::{DenseMatrix, Vector};
use crate::scalar::Scalar;

pub fn load_matrix<T: Scalar>(path: impl AsRef<Path>) -> Result<DenseMatrix<T>> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

pub fn load_vector<T: Scalar>(path: impl AsRef<Path>) -> Result<Vector<T>> {
    read_vector(BufReader::new(File::open(path)?))
}

pub fn load_problem_spec(path: impl AsRef<Path>) -> Result<ProblemSpec> {
    let spec: ProblemSpec = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    spec.validate()?;
    Ok(spec)
}
