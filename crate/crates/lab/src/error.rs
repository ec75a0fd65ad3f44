use std::path::PathBuf;

use vessel_core::VesselError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{path}: parse error at byte {offset} (line {line}, column {column}): {message}")]
    Parse { path: PathBuf, offset: usize, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] VesselError),
}

impl LabError {
    /// 2 for usage, IO and file-format problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Numeric(_) => 1,
            _ => 2,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
