//! CSV time-series input and output.

use std::path::Path;

use thiserror::Error;

use crate::numfmt::g17;
use crate::series::TimeSeries;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("{path}: row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        value: String,
    },
    #[error("{path}: row {row} has {found} fields, header has {expected}")]
    Ragged {
        path: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}: no data")]
    Empty { path: String },
}

/// Reads a header row of variable names followed by one numeric row per time
/// step. Rows are numbered from 1 after the header.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries, CsvError> {
    let shown = path.display().to_string();
    let read_err = |e: csv::Error| CsvError::Read {
        path: shown.clone(),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(read_err)?;
    let names: Vec<String> = reader.headers().map_err(read_err)?.iter().map(str::to_owned).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(CsvError::Empty { path: shown });
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(read_err)?;
        if record.len() != names.len() {
            return Err(CsvError::Ragged {
                path: shown,
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| CsvError::Parse {
                path: shown.clone(),
                row,
                column: j,
                value: field.to_owned(),
            })?;
            columns[j].push(v);
        }
    }
    if columns[0].is_empty() {
        return Err(CsvError::Empty { path: shown });
    }
    TimeSeries::from_columns(columns)
        .and_then(|s| s.with_names(names))
        .map_err(|e| CsvError::Read {
            path: shown,
            message: e.to_string(),
        })
}

/// Writes `series` with a header row; values round-trip exactly.
pub fn write_series_csv(series: &TimeSeries, out: &mut Vec<u8>) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(series.names())?;
    for t in 0..series.n_rows() {
        w.write_record((0..series.n_vars()).map(|j| g17(series.value(t, j))))?;
    }
    w.flush()?;
    Ok(())
}
