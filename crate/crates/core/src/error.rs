use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate poi_id in region assignments: {0}")]
    DuplicateAssignment(String),

    #[error("region assignment for {poi_id}: cbg_geoid {cbg_geoid} does not start with county_fips {county_fips}")]
    RegionMismatch {
        poi_id: String,
        county_fips: String,
        cbg_geoid: String,
    },

    #[error("insufficient data: need {required}, have {available}")]
    InsufficientData { required: usize, available: usize },

    #[error("singular penalized system in block `{block}`")]
    Singular { block: String },

    #[error("unmatched state code `{0}`")]
    UnknownState(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("remote batch failed for items {indices:?}: {message}")]
    RemoteBatch { indices: Vec<usize>, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
