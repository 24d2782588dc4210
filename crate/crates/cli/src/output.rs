use std::io::Write;
use std::path::Path;

use semikrylov::io::{IterationScalars, RunReport};
use tempfile::NamedTempFile;

use crate::UsageError;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(
    path: &Path,
    fill: impl FnOnce(&mut NamedTempFile) -> std::io::Result<()>,
) -> Result<(), UsageError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    fill(&mut tmp).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| UsageError(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn emit_report(report: &RunReport, out: Option<&Path>) -> Result<(), UsageError> {
    let text = report.to_json().map_err(|e| UsageError(e.to_string()))?;
    match out {
        Some(path) => write_atomic(path, |f| writeln!(f, "{text}")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

const CSV_HEADER: [&str; 9] = [
    "iter",
    "alpha",
    "beta",
    "res_norm",
    "normal_res_norm",
    "range_res_norm",
    "null_res_norm",
    "measured_bound_quantity",
    "bound_value",
];

fn cell(column: &[f64], i: usize) -> String {
    column.get(i).map(|v| format!("{v:e}")).unwrap_or_default()
}

/// One row per iterate; cells a run did not produce stay empty.
pub fn write_trace_csv(scalars: &IterationScalars, path: &Path) -> Result<(), UsageError> {
    let rows = scalars.res_norm.len().max(scalars.measured.len());
    write_atomic(path, |f| {
        let mut w = csv::Writer::from_writer(f);
        w.write_record(CSV_HEADER)?;
        for i in 0..rows {
            w.write_record([
                i.to_string(),
                cell(&scalars.alpha, i),
                cell(&scalars.beta, i),
                cell(&scalars.res_norm, i),
                cell(&scalars.normal_res_norm, i),
                cell(&scalars.range_res_norm, i),
                cell(&scalars.null_res_norm, i),
                cell(&scalars.measured, i),
                cell(&scalars.bound, i),
            ])?;
        }
        w.flush()
    })
}
