//! Plain-text file formats and figure output.
//!
//! * [`lattice_file`]: versioned ASCII dump of one lattice.
//! * [`table_file`]: coupling tables as `SRC DST dx dy dz re im` lines.
//! * [`csv`]: probe series and prune reports.
//! * [`plot`]: dependency-free SVG line and XY plots.

pub mod csv;
pub mod lattice_file;
pub mod plot;
pub mod table_file;

use std::path::PathBuf;

use crate::lattice::LatticeError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: unsupported format version {found} (expected {expected})", path.display())]
    Version {
        path: PathBuf,
        found: String,
        expected: u32,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: ::csv::Error },
    #[error("lattice name `{0}` must be a non-empty token without whitespace")]
    InvalidName(String),
    #[error("no series to write")]
    NoSeries,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: ::csv::Error) -> Self {
        IoError::Csv {
            path: path.into(),
            source,
        }
    }
}
