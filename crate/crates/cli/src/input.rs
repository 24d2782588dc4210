use std::path::Path;

use semikrylov::io::{load_matrix, load_problem_spec, load_vector};
use semikrylov::{make_problem, Matrix, Method, ProblemSpec, Vec64};

use crate::{ProblemArgs, UsageError};

pub const SEED_ENV: &str = "SEMIKRYLOV_SEED";

pub struct Input {
    pub a: Matrix,
    pub b: Vec64,
    /// Start vector of the chosen method: x₀ for cg/cgls, y₀ for cgne.
    pub start: Vec64,
    /// Effective seed when the problem was generated.
    pub seed: Option<u64>,
}

/// `--seed`, then `SEMIKRYLOV_SEED`, then the spec's own seed.
pub fn effective_seed(flag: Option<u64>, spec_seed: u64) -> Result<u64, UsageError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{SEED_ENV}=`{text}` is not an unsigned 64-bit integer"))),
        Err(_) => Ok(spec_seed),
    }
}

pub fn load_spec(path: &Path, seed_flag: Option<u64>) -> Result<ProblemSpec, UsageError> {
    let mut spec = load_problem_spec(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    spec.seed = effective_seed(seed_flag, spec.seed)?;
    Ok(spec)
}

fn start_vector(arg: Option<&str>, len: usize) -> Result<Option<Vec64>, UsageError> {
    let Some(arg) = arg else { return Ok(None) };
    let v = if arg == "zero" {
        Vec64::zeros(len)
    } else if let Some(path) = arg.strip_prefix("file:") {
        load_vector(path).map_err(|e| UsageError(format!("{path}: {e}")))?
    } else {
        return Err(UsageError(format!("--x0 expects `zero` or `file:<path>`, got `{arg}`")));
    };
    if v.len() != len {
        return Err(UsageError(format!(
            "start vector has length {}, expected {len}",
            v.len()
        )));
    }
    Ok(Some(v))
}

pub fn load(args: &ProblemArgs, method: Method) -> Result<Input, UsageError> {
    let start_len = |a: &Matrix| if method == Method::Cgne { a.rows() } else { a.cols() };
    if let Some(path) = &args.spec {
        let spec = load_spec(path, args.seed)?;
        let problem = make_problem::<f64>(&spec)?;
        let start = match start_vector(args.x0.as_deref(), start_len(&problem.a))? {
            Some(v) => v,
            None if method == Method::Cgne => problem.y0,
            None => problem.x0,
        };
        return Ok(Input {
            a: problem.a,
            b: problem.b,
            start,
            seed: Some(spec.seed),
        });
    }
    let (Some(matrix), Some(rhs)) = (&args.matrix, &args.rhs) else {
        return Err(UsageError(
            "either --spec or both --matrix and --rhs are required".into(),
        ));
    };
    let a: Matrix = load_matrix(matrix).map_err(|e| UsageError(format!("{}: {e}", matrix.display())))?;
    let b: Vec64 = load_vector(rhs).map_err(|e| UsageError(format!("{}: {e}", rhs.display())))?;
    if b.len() != a.rows() {
        return Err(UsageError(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let start = start_vector(args.x0.as_deref(), start_len(&a))?.unwrap_or_else(|| Vec64::zeros(start_len(&a)));
    Ok(Input {
        a,
        b,
        start,
        seed: None,
    })
}
