//! Matrix Market text format (`array` / `coordinate`, `real`, `general` /
//! `symmetric`).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(Error::parse(
            1,
            "expected header `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(Error::parse(1, format!("unsupported object `{}`", tokens[1])));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(Error::parse(1, format!("unsupported format `{other}`"))),
    };
    if tokens[3] != "real" {
        return Err(Error::parse(
            1,
            format!("unsupported field `{}` (only `real` is accepted)", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::parse(1, format!("unsupported symmetry `{other}`"))),
    };
    Ok((layout, symmetry))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid real value `{token}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value `{token}`")));
    }
    Ok(v)
}

fn parse_index(token: &str, bound: usize, line: usize) -> Result<usize> {
    let i: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid index `{token}`")))?;
    if i == 0 || i > bound {
        return Err(Error::parse(line, format!("index {i} out of range 1..={bound}")));
    }
    Ok(i - 1)
}

/// Parses a Matrix Market stream into a dense matrix. Symmetric storage is
/// expanded by mirroring the lower triangle.
pub fn read_matrix_market<T: Scalar, R: BufRead>(reader: R) -> Result<DenseMatrix<T>> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let (layout, symmetry) = parse_header(&header?)?;

    // skip comments and blank lines
    let mut body = lines.filter_map(|(no, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((no, t.to_string())))
            }
        }
        Err(e) => Some(Err(Error::from(e))),
    });

    let (size_line, size) = body.next().ok_or_else(|| Error::parse(2, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(size_line, format!("invalid size `{t}`")))
        })
        .collect::<Result<_>>()?;
    let expected_fields = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != expected_fields {
        return Err(Error::parse(
            size_line,
            format!("size line needs {expected_fields} integers"),
        ));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 || cols == 0 {
        return Err(Error::parse(size_line, "matrix dimensions must be positive"));
    }
    if symmetry == Symmetry::Symmetric && rows != cols {
        return Err(Error::parse(size_line, "symmetric matrix must be square"));
    }

    let mut m = DenseMatrix::<T>::zeros(rows, cols);
    let mut last_line = size_line;
    match layout {
        Layout::Array => {
            // column-major; symmetric files list only the lower triangle
            let positions: Vec<(usize, usize)> = match symmetry {
                Symmetry::General => (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect(),
                Symmetry::Symmetric => (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect(),
            };
            let mut count = 0;
            for entry in body {
                let (no, text) = entry?;
                last_line = no;
                for token in text.split_whitespace() {
                    let &(i, j) = positions
                        .get(count)
                        .ok_or_else(|| Error::parse(no, "more values than the declared size"))?;
                    let v = T::lit(parse_value(token, no)?);
                    m[(i, j)] = v;
                    if symmetry == Symmetry::Symmetric {
                        m[(j, i)] = v;
                    }
                    count += 1;
                }
            }
            if count != positions.len() {
                return Err(Error::parse(
                    last_line,
                    format!("expected {} values, found {count}", positions.len()),
                ));
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut count = 0;
            for entry in body {
                let (no, text) = entry?;
                last_line = no;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                if tokens.len() != 3 {
                    return Err(Error::parse(no, "coordinate entry needs `row col value`"));
                }
                if count == nnz {
                    return Err(Error::parse(no, "more entries than declared"));
                }
                let i = parse_index(tokens[0], rows, no)?;
                let j = parse_index(tokens[1], cols, no)?;
                let v = T::lit(parse_value(tokens[2], no)?);
                if symmetry == Symmetry::Symmetric {
                    if i < j {
                        return Err(Error::parse(no, "symmetric file lists an upper-triangle entry"));
                    }
                    m[(j, i)] += if i != j { v } else { T::zero() };
                }
                m[(i, j)] += v;
                count += 1;
            }
            if count != nnz {
                return Err(Error::parse(
                    last_line,
                    format!("expected {nnz} entries, found {count}"),
                ));
            }
        }
    }
    Ok(m)
}

/// Reads an n×1 (or 1×n) file as a vector.
pub fn read_vector<T: Scalar, R: BufRead>(reader: R) -> Result<Vector<T>> {
    let m = read_matrix_market::<T, R>(reader)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(Error::InvalidInput(format!(
            "expected a vector file, got a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(Vector::from_vec(m.as_slice().to_vec()))
}

/// Writes `array real general` with 17 significant digits per value.
pub fn write_matrix_market<T: Scalar, W: Write>(a: &DenseMatrix<T>, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(out, "{:.16e}", a[(i, j)].to_f64_lossy())?;
        }
    }
    Ok(())
}

/// Writes a vector as an n×1 array file.
pub fn write_vector<T: Scalar, W: Write>(v: &Vector<T>, out: W) -> Result<()> {
    let column = DenseMatrix::from_row_major(v.len(), 1, v.to_vec())?;
    write_matrix_market(&column, out)
}
