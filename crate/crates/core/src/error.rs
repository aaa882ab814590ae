use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV input: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row} has {found} cells, header declares {expected}")]
    RowShape {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("rule syntax error on line {line}: {message}")]
    RuleSyntax { line: usize, message: String },

    #[error("label {value:?} for row {row} is not one of clean/dirty")]
    Label { row: usize, value: String },

    #[error("row id {row_id} does not exist (dataset has {rows} rows)")]
    Key { row_id: String, rows: usize },

    #[error("ground truth has no label for row {row}")]
    MissingTruth { row: usize },

    #[error("density needs at least two rows, dataset has {rows}")]
    EmptyPool { rows: usize },

    #[error("input already violates the rules ({edges} conflicting pairs)")]
    CleanPrecondition { edges: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a broken invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
