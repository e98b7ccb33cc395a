use std::path::PathBuf;

use thiserror::Error;

/// Anything that stops a run because of its input data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("project {project_id} appears in rows {first_row} and {row}")]
    DuplicateProject {
        project_id: u32,
        first_row: usize,
        row: usize,
    },
    #[error("{count} record(s) fail validation:\n{details}")]
    Invalid { count: usize, details: String },
    #[error(transparent)]
    Model(#[from] effortlab_core::Error),
}
