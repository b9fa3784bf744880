use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("file not found: {}", .0.display())]
    FileMissing(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed record in {}: {location}", path.display())]
    MalformedRecord { path: PathBuf, location: String },

    #[error("id out of range in image {image}, relationship {vr_index}: {field}")]
    IdOutOfRange {
        image: String,
        vr_index: usize,
        field: &'static str,
    },

    #[error("duplicate master-list name {0:?}")]
    DuplicateMasterName(String),

    #[error("unknown name {0:?}")]
    UnknownName(String),
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            CorpusError::FileMissing(path)
        } else {
            CorpusError::Io { path, source }
        }
    }

    /// True for filesystem failures as opposed to bad data.
    pub fn is_io(&self) -> bool {
        matches!(self, CorpusError::FileMissing(_) | CorpusError::Io { .. })
    }
}
