use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Time-indexed responses and covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData<T> {
    pub dates: Option<Vec<String>>,
    /// One vector per response series, each of length `T_total`.
    pub y: Vec<Vec<T>>,
    /// `T_total x p`.
    pub x_raw: Matrix<T>,
    pub series_names: Vec<String>,
    pub covariate_names: Vec<String>,
}

impl<T: Real> PanelData<T> {
    pub fn len(&self) -> usize {
        self.x_raw.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn response(&self, name: &str) -> Option<&[T]> {
        self.series_names.iter().position(|s| s == name).map(|i| self.y[i].as_slice())
    }
}

/// Handling of missing or unparseable numeric cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ImputePolicy {
    /// Fail, naming the row and column.
    #[default]
    Reject,
    /// Replace with the mean of the column's valid entries.
    ColumnMean,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Columns to treat as responses; every other non-date column is a
    /// covariate.
    pub responses: Vec<String>,
    /// Label column. When unset, a first column named `date` or `sasdate`
    /// (any case) is used.
    pub date_column: Option<String>,
    pub impute: ImputePolicy,
    /// Minimum number of data rows.
    pub min_rows: usize,
}

pub fn ingest_csv<T: Real>(path: &Path, opts: &IngestOptions) -> Result<PanelData<T>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file, opts)
}

/// As [`ingest_csv`] for any reader.
pub fn ingest_reader<T: Real, R: Read>(reader: R, opts: &IngestOptions) -> Result<PanelData<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing header row".into(),
        });
    }
    let date_idx = match &opts.date_column {
        Some(name) => Some(column_index(&headers, name)?),
        None => {
            let first = headers[0].to_ascii_lowercase();
            (first == "date" || first == "sasdate").then_some(0)
        }
    };
    let mut response_idx = Vec::with_capacity(opts.responses.len());
    for name in &opts.responses {
        let i = column_index(&headers, name)?;
        if Some(i) == date_idx {
            return Err(Error::Config(format!("column '{name}' is both the date and a response")));
        }
        response_idx.push(i);
    }
    let covariate_idx: Vec<usize> = (0..headers.len())
        .filter(|i| Some(*i) != date_idx && !response_idx.contains(i))
        .collect();
    if covariate_idx.is_empty() {
        return Err(Error::Config("no covariate columns left after responses and date".into()));
    }

    // numeric cells are kept as Option until the imputation pass
    let numeric: Vec<usize> = response_idx.iter().chain(&covariate_idx).copied().collect();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); headers.len()];
    let mut dates = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if let Some(d) = date_idx {
            dates.push(record[d].to_string());
        }
        for &c in &numeric {
            let v = record[c].parse::<f64>().ok().filter(|v| v.is_finite());
            if v.is_none() && opts.impute == ImputePolicy::Reject {
                return Err(Error::MissingValue {
                    row: row + 1,
                    column: headers[c].clone(),
                });
            }
            cells[c].push(v);
        }
    }
    let rows = dates.len().max(cells[numeric[0]].len());
    if rows == 0 || rows < opts.min_rows {
        return Err(Error::Config(format!(
            "panel has {rows} data rows, at least {} required",
            opts.min_rows.max(1)
        )));
    }
    let mut filled: Vec<Vec<T>> = vec![Vec::new(); headers.len()];
    for &c in &numeric {
        let valid: Vec<f64> = cells[c].iter().flatten().copied().collect();
        if valid.is_empty() {
            return Err(Error::MissingValue {
                row: 1,
                column: headers[c].clone(),
            });
        }
        let mean = valid.iter().sum::<f64>() / valid.len() as f64;
        filled[c] = cells[c].iter().map(|v| T::lit(v.unwrap_or(mean))).collect();
    }
    let x_raw = Matrix::from_fn(rows, covariate_idx.len(), |i, j| filled[covariate_idx[j]][i]);
    Ok(PanelData {
        dates: date_idx.map(|_| dates),
        y: response_idx.iter().map(|&c| filled[c].clone()).collect(),
        x_raw,
        series_names: response_idx.iter().map(|&c| headers[c].clone()).collect(),
        covariate_names: covariate_idx.iter().map(|&c| headers[c].clone()).collect(),
    })
}

fn column_index(headers: &[String], name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("no column named '{name}'")))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    let column = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => (*expected_len.min(len) + 1) as usize,
        _ => 0,
    };
    Error::Parse {
        line,
        column,
        message: e.to_string(),
    }
}
