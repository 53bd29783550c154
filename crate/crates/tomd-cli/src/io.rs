//! File formats: whitespace tensor text files, numeric CSV matrices, and
//! integer label files.
//!
//! Tensor text format: the first line holds the space-separated extents;
//! each following line holds one scalar, in column-major (first index
//! fastest) order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use tomd_core::DenseTensor;

use crate::CliError;

pub fn read_tensor(path: &Path) -> Result<DenseTensor, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| {
        CliError::validation(format!("{}: empty tensor file", path.display()))
    })?;
    let shape: Vec<usize> = header
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| {
                CliError::validation(format!(
                    "{}: bad extent {tok:?} in header line",
                    path.display()
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut data = Vec::with_capacity(shape.iter().product());
    for (lineno, line) in lines {
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| {
                CliError::validation(format!(
                    "{}: non-numeric value {tok:?} at line {}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            data.push(x);
        }
    }
    DenseTensor::new(shape, data)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn write_tensor(path: &Path, t: &DenseTensor) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let header: Vec<String> = t.shape().iter().map(|e| e.to_string()).collect();
    let mut out = header.join(" ");
    out.push('\n');
    for x in t.data() {
        out.push_str(&format!("{x}\n"));
    }
    w.write_all(out.as_bytes())
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

/// Read a headerless numeric CSV as a rows×cols matrix.
pub fn read_matrix_csv(path: &Path) -> Result<DenseTensor, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::validation(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        let row: Vec<f64> = record
            .iter()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    CliError::validation(format!(
                        "{}: non-numeric cell {tok:?} at row {}",
                        path.display(),
                        i + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::validation(format!(
                    "{}: row {} has {} cells, expected {}",
                    path.display(),
                    i + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!(
            "{}: empty matrix",
            path.display()
        )));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DenseTensor::from_fn(&[r, c], |ix| rows[ix[0]][ix[1]]))
}

pub fn write_matrix_csv(path: &Path, m: &DenseTensor) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{}", m.get2(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

/// Read one integer label per line (single-column CSV).
pub fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| {
                CliError::validation(format!(
                    "{}: non-integer label {l:?} at line {}",
                    path.display(),
                    i + 1
                ))
            })
        })
        .collect()
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<(), CliError> {
    let mut out = String::new();
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}
