//! JSON run report shared by every CLI subcommand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundKind;
use crate::solvers::{Method, StopReason};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Extreme nonzero eigenvalues (cg) or singular values (cgls, cgne) of the
/// operator; the other pair stays `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub kappa: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub sigma_min: Option<f64>,
}

/// Parallel-indexed histories. Vectors indexed by iterate have
/// `iterations + 1` entries; `alpha` and `beta` have `iterations`. Columns
/// that do not apply to a run are empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationScalars {
    pub res_norm: Vec<f64>,
    pub normal_res_norm: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub range_res_norm: Vec<f64>,
    pub null_res_norm: Vec<f64>,
    pub measured: Vec<f64>,
    pub bound: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleDistances {
    /// `‖x − A†b‖₂ / max(‖A†b‖₂, 1)` for the final iterate.
    pub min_norm_rel_error: f64,
    /// `‖x − (A†b + P_N x₀)‖₂ / max(‖A†b + P_N x₀‖₂, 1)`, where `P_N` projects
    /// onto the null space of `A`.
    pub offset_rel_error: f64,
    /// `‖P_N x‖₂` of the final iterate.
    pub null_component_norm: f64,
    pub pinv_solution_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub consistent: bool,
    pub rhs_null_norm: f64,
    pub equivalence_max_deviation: f64,
    pub equivalence_iterations_compared: usize,
    pub equivalence_pass: bool,
    pub confinement_max_angle: Option<f64>,
    pub confinement_pass: Option<bool>,
    pub null_residual_deviation: f64,
    pub null_iterate_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub kind: BoundKind,
    pub contraction_factor: f64,
    pub violations: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub method: Method,
    pub dims: [usize; 2],
    pub rank: usize,
    pub spectral_summary: SpectralSummary,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub per_iteration: IterationScalars,
    pub oracle_distances: OracleDistances,
    pub diagnostics: Option<Diagnostics>,
    pub bound: Option<BoundSummary>,
    pub seed: Option<u64>,
    pub checks: BTreeMap<String, bool>,
    pub pass: bool,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

impl RunReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Sets `pass` to the conjunction of all checks.
    pub fn finalize(&mut self) {
        self.pass = self.checks.values().all(|&ok| ok);
    }
}
