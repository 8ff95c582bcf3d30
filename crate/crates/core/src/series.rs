//! Column-per-variable time series storage.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series has no variables")]
    NoColumns,
    #[error("column {column} has {found} rows, expected {expected}")]
    Ragged {
        column: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} names given for {expected} columns")]
    NameCount { expected: usize, found: usize },
}

/// A `T × n` matrix of observations: one column per variable, one row per
/// time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    columns: Vec<Vec<f64>>,
    names: Vec<String>,
    rows: usize,
}

/// Default variable names `X0`, `X1`, ...
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("X{i}")).collect()
}

impl TimeSeries {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self, SeriesError> {
        let rows = columns.first().ok_or(SeriesError::NoColumns)?.len();
        for (column, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(SeriesError::Ragged {
                    column,
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        let names = default_names(columns.len());
        Ok(TimeSeries {
            columns,
            names,
            rows,
        })
    }

    /// Builds from row-major observations (`rows[t][j]`).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SeriesError> {
        let n = rows.first().map_or(0, |r| r.len());
        if n == 0 {
            return Err(SeriesError::NoColumns);
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for r in rows {
            if r.len() != n {
                return Err(SeriesError::Ragged {
                    column: r.len().min(n),
                    expected: n,
                    found: r.len(),
                });
            }
            for (c, &v) in columns.iter_mut().zip(r) {
                c.push(v);
            }
        }
        Self::from_columns(columns)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, SeriesError> {
        if names.len() != self.columns.len() {
            return Err(SeriesError::NameCount {
                expected: self.columns.len(),
                found: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn value(&self, t: usize, j: usize) -> f64 {
        self.columns[j][t]
    }

    /// Position `(row, column)` of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.columns.iter().enumerate().find_map(|(j, c)| {
            c.iter().position(|v| !v.is_finite()).map(|t| (t, j))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns_agree() {
        let ts = TimeSeries::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(ts.n_rows(), 3);
        assert_eq!(ts.n_vars(), 2);
        assert_eq!(ts.column(1), &[2.0, 4.0, 6.0]);
        assert_eq!(ts.value(2, 0), 5.0);
        assert_eq!(ts.names(), &["X0".to_string(), "X1".to_string()]);
    }

    #[test]
    fn ragged_input_is_rejected() {
        assert!(matches!(
            TimeSeries::from_columns(vec![vec![1.0, 2.0], vec![1.0]]),
            Err(SeriesError::Ragged { column: 1, .. })
        ));
        assert!(TimeSeries::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert_eq!(TimeSeries::from_columns(vec![]), Err(SeriesError::NoColumns));
    }

    #[test]
    fn non_finite_position() {
        let ts = TimeSeries::from_columns(vec![vec![1.0, 2.0], vec![0.0, f64::INFINITY]]).unwrap();
        assert_eq!(ts.first_non_finite(), Some((1, 1)));
    }
}
