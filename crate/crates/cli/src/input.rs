//! CSV ingestion: header-driven column selection, strict numeric parsing,
//! streaming row reads.

use std::path::Path;

use robust_bvs_core::nalgebra::{DMatrix, DVector};
use robust_bvs_core::Dataset;

use crate::config::AnalysisConfig;
use crate::errors::{CliError, CliResult};

/// Resolve a column reference (name, or 0-based index as a fallback) against
/// the header row.
fn resolve_column(headers: &[String], reference: &str) -> CliResult<usize> {
    if let Some(pos) = headers.iter().position(|h| h == reference) {
        return Ok(pos);
    }
    if let Ok(idx) = reference.parse::<usize>() {
        if idx < headers.len() {
            return Ok(idx);
        }
        return Err(CliError::Data(format!(
            "column index {idx} out of range; the file has {} columns",
            headers.len()
        )));
    }
    Err(CliError::Data(format!(
        "column '{reference}' not found; available columns: {}",
        headers.join(", ")
    )))
}

/// Load the dataset described by `cfg`. Cells must be plain decimal numbers;
/// missing values are rejected with their row and column.
pub fn load_csv(path: &Path, cfg: &AnalysisConfig) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if headers.is_empty() {
        return Err(CliError::Data("the CSV file has no header row".into()));
    }

    let response_idx = match &cfg.response {
        Some(r) => resolve_column(&headers, r)?,
        None => 0,
    };
    let fixed_idx: Vec<usize> = cfg
        .fixed_columns
        .iter()
        .map(|c| resolve_column(&headers, c))
        .collect::<CliResult<_>>()?;
    let candidate_idx: Vec<usize> = if cfg.candidate_columns.is_empty() {
        (0..headers.len())
            .filter(|i| *i != response_idx && !fixed_idx.contains(i))
            .collect()
    } else {
        cfg.candidate_columns
            .iter()
            .map(|c| resolve_column(&headers, c))
            .collect::<CliResult<_>>()?
    };

    if fixed_idx.contains(&response_idx) || candidate_idx.contains(&response_idx) {
        return Err(CliError::Config(format!(
            "response column '{}' also appears among the predictors",
            headers[response_idx]
        )));
    }
    if let Some(dup) = fixed_idx.iter().find(|i| candidate_idx.contains(i)) {
        return Err(CliError::Config(format!(
            "column '{}' is listed as both fixed and candidate",
            headers[*dup]
        )));
    }

    // Stream rows, reusing one record buffer.
    let mut y = Vec::new();
    let mut fixed_data: Vec<Vec<f64>> = vec![Vec::new(); fixed_idx.len()];
    let mut cand_data: Vec<Vec<f64>> = vec![Vec::new(); candidate_idx.len()];
    let mut record = csv::StringRecord::new();
    let mut row = 1usize; // header is row 1
    while reader.read_record(&mut record)? {
        row += 1;
        let parse = |idx: usize| -> CliResult<f64> {
            let cell = record.get(idx).unwrap_or("");
            if cell.is_empty() {
                return Err(CliError::Data(format!(
                    "missing value at row {row}, column '{}'",
                    headers[idx]
                )));
            }
            cell.parse::<f64>().map_err(|_| {
                CliError::Data(format!(
                    "non-numeric cell '{cell}' at row {row}, column '{}'",
                    headers[idx]
                ))
            })
        };
        y.push(parse(response_idx)?);
        for (slot, &idx) in fixed_data.iter_mut().zip(&fixed_idx) {
            slot.push(parse(idx)?);
        }
        for (slot, &idx) in cand_data.iter_mut().zip(&candidate_idx) {
            slot.push(parse(idx)?);
        }
    }
    let n = y.len();
    if n == 0 {
        return Err(CliError::Data("the CSV file has no data rows".into()));
    }

    let with_intercept = fixed_idx.is_empty() && cfg.intercept;
    let (x0, fixed_names) = if with_intercept {
        (DMatrix::from_element(n, 1, 1.0), vec!["(intercept)".to_string()])
    } else {
        let mut x0 = DMatrix::zeros(n, fixed_idx.len());
        for (j, col) in fixed_data.iter().enumerate() {
            x0.set_column(j, &DVector::from_vec(col.clone()));
        }
        (x0, fixed_idx.iter().map(|&i| headers[i].clone()).collect())
    };
    let mut x = DMatrix::zeros(n, candidate_idx.len());
    for (j, col) in cand_data.iter().enumerate() {
        x.set_column(j, &DVector::from_vec(col.clone()));
    }
    let candidate_names = candidate_idx.iter().map(|&i| headers[i].clone()).collect();

    Dataset::new(DVector::from_vec(y), x0, x, fixed_names, candidate_names)
        .map_err(CliError::from)
}
