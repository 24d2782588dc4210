//! `semikrylov` command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
//! parse or input errors.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semikrylov::Method;

#[derive(Parser, Debug)]
#[command(
    name = "semikrylov",
    version,
    about = "CG, CGLS and CGNE on singular and rank-deficient systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one solver and compare the result with the pseudoinverse solution.
    Solve(SolveArgs),
    /// Compare plain CG against the eigenbasis-decomposed recurrence.
    Diagnose(DiagnoseArgs),
    /// Check the per-iteration error bound of a method.
    VerifyBounds(BoundArgs),
    /// Write a generated problem as Matrix Market files.
    Generate(GenerateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Cg,
    Cgls,
    Cgne,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Cg => Method::Cg,
            MethodArg::Cgls => Method::Cgls,
            MethodArg::Cgne => Method::Cgne,
        }
    }
}

/// Where the problem comes from: a ProblemSpec JSON, or explicit files.
#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// ProblemSpec JSON; replaces --matrix/--rhs.
    #[arg(long, conflicts_with_all = ["matrix", "rhs"])]
    pub spec: Option<PathBuf>,
    /// Matrix Market file holding A.
    #[arg(long, requires = "rhs")]
    pub matrix: Option<PathBuf>,
    /// Matrix Market n×1 file holding b.
    #[arg(long, requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Start vector: `zero` or `file:<path>`. For cgne this is y₀ (length m).
    #[arg(long)]
    pub x0: Option<String>,
    /// Overrides the spec seed (and SEMIKRYLOV_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative threshold for numerical rank.
    #[arg(long, default_value_t = semikrylov::linalg::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Iteration cap [default: 10 × number of unknowns].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Relative stopping threshold: on ‖r‖/max(‖b‖, 1) for cg and cgne, on ‖Aᵀr‖/max(‖Aᵀb‖, 1) for cgls.
    #[arg(long, default_value_t = semikrylov::solvers::DEFAULT_REL_TOL)]
    pub rel_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// JSON report path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of CG steps to compare.
    #[arg(long, default_value_t = 20)]
    pub iters: usize,
    /// Tolerance for equivalence and confinement.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// ProblemSpec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the spec seed (and SEMIKRYLOV_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Failure that maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<semikrylov::Error> for UsageError {
    fn from(e: semikrylov::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Diagnose(args) => commands::diagnose(&args),
        Command::VerifyBounds(args) => commands::verify_bounds(&args),
        Command::Generate(args) => commands::generate(&args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
