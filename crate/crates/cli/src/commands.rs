use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use semikrylov::bounds::SpectralData;
use semikrylov::decomposition::{null_iterate_deviation, null_residual_deviation};
use semikrylov::io::{
    write_matrix_market, write_vector, BoundSummary, Diagnostics, IterationScalars, OracleDistances, RunReport,
    SpectralSummary, REPORT_SCHEMA_VERSION,
};
use semikrylov::oracle::{consistency_check, DEFAULT_CONSISTENCY_TOL};
use semikrylov::{
    cg_bound_verify, cg_solve, cgls_bound_verify, cgls_solve, cgne_bound_verify, cgne_solve, decomposed_cg_run,
    equivalence_check, make_problem, matvec, null_direction_confinement, pinv_apply_rect, pseudoinverse_apply, split,
    svd, symmetric_eig, Bounds, Config, Error, Matrix, Method, Spectral, StopReason, Svd, Trace, Vec64,
};

use crate::input::{self, Input};
use crate::output::{emit_report, write_atomic, write_trace_csv};
use crate::{BoundArgs, DiagnoseArgs, GenerateArgs, OutputArgs, SolveArgs, SolverArgs, UsageError};

/// Threshold for the null-space structure checks of `diagnose`.
const STRUCTURE_TOL: f64 = 1e-10;

enum Spectrum {
    Eig(Spectral),
    Sing(Svd),
}

impl Spectrum {
    fn of(method: Method, a: &Matrix, rank_tol: f64) -> Result<Self, UsageError> {
        Ok(match method {
            Method::Cg => {
                a.check_symmetric()?;
                Spectrum::Eig(symmetric_eig(a, rank_tol)?)
            }
            Method::Cgls | Method::Cgne => Spectrum::Sing(svd(a, rank_tol)?),
        })
    }

    fn rank(&self) -> usize {
        match self {
            Spectrum::Eig(d) => d.rank,
            Spectrum::Sing(d) => d.rank,
        }
    }

    fn summary(&self) -> SpectralSummary {
        match self {
            Spectrum::Eig(d) if d.rank > 0 => SpectralSummary {
                kappa: d.condition_number(),
                lambda_max: Some(d.lambdas[0]),
                lambda_min: Some(d.lambdas[d.rank - 1]),
                ..Default::default()
            },
            Spectrum::Sing(d) => match d.extreme_sigmas() {
                Some((hi, lo)) => SpectralSummary {
                    kappa: Some(hi / lo),
                    sigma_max: Some(hi),
                    sigma_min: Some(lo),
                    ..Default::default()
                },
                None => SpectralSummary::default(),
            },
            Spectrum::Eig(_) => SpectralSummary::default(),
        }
    }

    /// Norms of the range and null-space parts of a residual.
    fn residual_parts(&self, r: &Vec64) -> Result<(f64, f64), UsageError> {
        Ok(match self {
            Spectrum::Eig(d) => {
                let s = split(d, r)?;
                (s.range_part.norm(), s.null_part.norm())
            }
            Spectrum::Sing(d) => (d.left_range_coords(r).norm(), d.left_null_coords(r).norm()),
        })
    }

    fn pinv(&self, b: &Vec64) -> Result<Vec64, UsageError> {
        Ok(match self {
            Spectrum::Eig(d) => pseudoinverse_apply(d, b)?,
            Spectrum::Sing(d) => pinv_apply_rect(d, b)?,
        })
    }

    /// Norm of the component of `x` in the null space of `A`.
    fn null_norm(&self, x: &Vec64) -> Result<f64, UsageError> {
        Ok(match self {
            Spectrum::Eig(d) => split(d, x)?.null_part.norm(),
            Spectrum::Sing(d) => d.right_null_coords(x).norm(),
        })
    }
}

fn solver_config(args: &SolverArgs) -> Config {
    let cfg = Config::default().with_rel_tol(args.rel_tol);
    match args.max_iters {
        Some(k) => cfg.with_max_iters(k),
        None => cfg,
    }
}

fn run_solver(method: Method, input: &Input, cfg: &Config) -> Result<Trace, UsageError> {
    Ok(match method {
        Method::Cg => cg_solve(&input.a, &input.b, &input.start, cfg)?,
        Method::Cgls => cgls_solve(&input.a, &input.b, &input.start, cfg)?,
        Method::Cgne => cgne_solve(&input.a, &input.b, &input.start, cfg)?,
    })
}

fn rel_distance(x: &Vec64, reference: &Vec64) -> f64 {
    x.sub(reference).norm() / reference.norm().max(1.0)
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Report skeleton shared by all trace-producing commands.
fn base_report(command: &str, input: &Input, spectrum: &Spectrum, trace: &Trace) -> Result<RunReport, UsageError> {
    let mut per_iteration = IterationScalars {
        res_norm: trace.residual_norms.clone(),
        normal_res_norm: trace.normal_residual_norms.clone(),
        alpha: trace.alphas.clone(),
        beta: trace.betas.clone(),
        ..Default::default()
    };
    for r in &trace.residuals {
        let (range, null) = spectrum.residual_parts(r)?;
        per_iteration.range_res_norm.push(range);
        per_iteration.null_res_norm.push(null);
    }

    let x = &trace.solution;
    let xstar = spectrum.pinv(&input.b)?;
    // start vector in solution space; cgne starts from x₀ = Aᵀy₀ ∈ R(Aᵀ)
    let x0 = match trace.method {
        Method::Cgne => input.a.tr_matvec(&input.start)?,
        _ => input.start.clone(),
    };
    // P_N x₀ = x₀ − A†(A x₀)
    let x0_null = x0.sub(&spectrum.pinv(&matvec(&input.a, &x0)?)?);
    let offset_target = xstar.add(&x0_null);

    Ok(RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: command.to_string(),
        method: trace.method,
        dims: [input.a.rows(), input.a.cols()],
        rank: spectrum.rank(),
        spectral_summary: spectrum.summary(),
        stop_reason: trace.stop_reason,
        iterations: trace.iterations(),
        per_iteration,
        oracle_distances: OracleDistances {
            min_norm_rel_error: rel_distance(x, &xstar),
            offset_rel_error: rel_distance(x, &offset_target),
            null_component_norm: spectrum.null_norm(x)?,
            pinv_solution_norm: xstar.norm(),
        },
        diagnostics: None,
        bound: None,
        seed: input.seed,
        checks: BTreeMap::new(),
        pass: false,
        timestamp: timestamp(),
    })
}

fn finish(mut report: RunReport, output: &OutputArgs) -> Result<bool, UsageError> {
    report.finalize();
    if let Some(path) = &output.trace_csv {
        write_trace_csv(&report.per_iteration, path)?;
    }
    emit_report(&report, output.out.as_deref())?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|(_, &ok)| !ok)
        .map(|(name, _)| name.as_str())
        .collect();
    if failed.is_empty() {
        eprintln!(
            "{} {}: pass after {} iterations",
            report.command, report.method, report.iterations
        );
    } else {
        eprintln!("{} {}: FAIL ({})", report.command, report.method, failed.join(", "));
    }
    Ok(report.pass)
}

pub fn solve(args: &SolveArgs) -> Result<bool, UsageError> {
    let method = Method::from(args.method);
    let input = input::load(&args.problem, method)?;
    let spectrum = Spectrum::of(method, &input.a, args.problem.rank_tol)?;
    let trace = run_solver(method, &input, &solver_config(&args.solver))?;
    let mut report = base_report("solve", &input, &spectrum, &trace)?;
    report
        .checks
        .insert("converged".into(), trace.stop_reason == StopReason::Converged);
    finish(report, &args.output)
}

fn bound_outcome(method: Method, trace: &Trace, spectrum: &Spectrum, input: &Input) -> semikrylov::Result<Bounds> {
    match (method, spectrum) {
        (Method::Cg, Spectrum::Eig(d)) => cg_bound_verify(trace, d),
        (Method::Cgls, Spectrum::Sing(d)) => cgls_bound_verify(trace, d, &pinv_apply_rect(d, &input.b)?),
        (Method::Cgne, Spectrum::Sing(d)) => cgne_bound_verify(trace, d),
        _ => unreachable!("spectrum kind follows the method"),
    }
}

pub fn verify_bounds(args: &BoundArgs) -> Result<bool, UsageError> {
    let method = Method::from(args.method);
    let input = input::load(&args.problem, method)?;
    let spectrum = Spectrum::of(method, &input.a, args.problem.rank_tol)?;
    let trace = run_solver(method, &input, &solver_config(&args.solver))?;
    let mut report = base_report("verify-bounds", &input, &spectrum, &trace)?;
    match bound_outcome(method, &trace, &spectrum, &input) {
        Ok(bounds) => {
            if method != Method::Cgls {
                report.checks.insert("rhs_consistent".into(), true);
            }
            report.checks.insert("bound".into(), bounds.pass);
            report.per_iteration.measured = bounds.measured.clone();
            report.per_iteration.bound = bounds.bound.clone();
            if let SpectralData::Eigen { kappa, .. } = bounds.kappa_or_sigmas {
                report.spectral_summary.kappa = Some(kappa);
            }
            report.bound = Some(BoundSummary {
                kind: bounds.kind,
                contraction_factor: bounds.contraction_factor,
                violations: bounds.violations.iter().map(|v| v.iteration).collect(),
                pass: bounds.pass,
            });
        }
        // the bound presumes a consistent system
        Err(Error::Inconsistent { .. }) => {
            report.checks.insert("rhs_consistent".into(), false);
        }
        Err(e) => return Err(e.into()),
    }
    finish(report, &args.output)
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<bool, UsageError> {
    let input = input::load(&args.problem, Method::Cg)?;
    let spectrum = Spectrum::of(Method::Cg, &input.a, args.problem.rank_tol)?;
    let Spectrum::Eig(decomp) = &spectrum else {
        unreachable!("cg uses the eigendecomposition")
    };
    let cfg = Config::default().with_max_iters(args.iters);
    let trace = run_solver(Method::Cg, &input, &cfg)?;
    let dtrace = decomposed_cg_run(decomp, &input.b, &input.start, args.iters)?;

    let consistency = consistency_check(decomp, &input.b, DEFAULT_CONSISTENCY_TOL)?;
    let equivalence = equivalence_check(&trace, &dtrace, decomp, args.tol)?;
    let confinement = if consistency.consistent {
        None
    } else {
        Some(null_direction_confinement(&dtrace, args.tol)?)
    };
    let null_residual = null_residual_deviation(&trace, decomp)?;
    let null_iterate = null_iterate_deviation(&trace, decomp)?;

    let mut report = base_report("diagnose", &input, &spectrum, &trace)?;
    report.checks.insert("equivalence".into(), equivalence.pass);
    report
        .checks
        .insert("null_residual_constant".into(), null_residual <= STRUCTURE_TOL);
    match confinement {
        Some(c) => {
            report.checks.insert("confinement".into(), c.pass);
        }
        // null part of the iterate only stagnates when b has no null component
        None => {
            report
                .checks
                .insert("null_iterate_constant".into(), null_iterate <= STRUCTURE_TOL);
        }
    }
    report.diagnostics = Some(Diagnostics {
        consistent: consistency.consistent,
        rhs_null_norm: consistency.null_norm,
        equivalence_max_deviation: equivalence.max_deviation,
        equivalence_iterations_compared: equivalence.iterations_compared,
        equivalence_pass: equivalence.pass,
        confinement_max_angle: confinement.map(|c| c.max_angle),
        confinement_pass: confinement.map(|c| c.pass),
        null_residual_deviation: null_residual,
        null_iterate_deviation: null_iterate,
    });
    finish(report, &args.output)
}

pub fn generate(args: &GenerateArgs) -> Result<bool, UsageError> {
    let spec = input::load_spec(&args.spec, args.seed)?;
    let problem = make_problem::<f64>(&spec)?;
    fs::create_dir_all(&args.out).map_err(|e| UsageError(format!("{}: {e}", args.out.display())))?;

    let write_mtx = |name: &str, m: &Matrix| {
        write_atomic(&args.out.join(name), |f| {
            write_matrix_market(m, f).map_err(std::io::Error::other)
        })
    };
    let write_vec = |name: &str, v: &Vec64| {
        write_atomic(&args.out.join(name), |f| {
            write_vector(v, f).map_err(std::io::Error::other)
        })
    };
    write_mtx("a.mtx", &problem.a)?;
    write_vec("b.mtx", &problem.b)?;
    write_vec("x0.mtx", &problem.x0)?;
    write_vec("y0.mtx", &problem.y0)?;
    write_vec("xstar.mtx", &problem.xstar_reference)?;
    let text = serde_json::to_string_pretty(&spec).map_err(|e| UsageError(e.to_string()))?;
    write_atomic(&args.out.join("spec.json"), |f| writeln!(f, "{text}"))?;
    eprintln!(
        "generate: {}x{} rank {} seed {} -> {}",
        spec.dims.0,
        spec.dims.1,
        problem.rank,
        spec.seed,
        args.out.display()
    );
    Ok(true)
}
