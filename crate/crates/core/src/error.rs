use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{routine} failed to converge after {iterations} iterations")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("column {index} of the idiosyncratic matrix has zero norm")]
    ColumnScale { index: usize },

    #[error("factor alignment failed: {0}")]
    Alignment(String),

    #[error("lasso did not converge after {sweeps} sweeps (max change {max_change:e})")]
    LassoNotConverged {
        sweeps: usize,
        max_change: f64,
        /// Last coefficient iterate, original scale.
        last_beta: Vec<f64>,
        last_alpha: Vec<f64>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("missing or unparseable value in row {row}, column '{column}'")]
    MissingValue { row: usize, column: String },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("window ending at t={t} failed: {source}")]
    Window {
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
