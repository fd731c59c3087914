use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    ConfigParse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{what} parse error at line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] framelet_core::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        LabError::ConfigParse(msg.into())
    }

    /// Process exit status; distinct for every failure kind.
    pub fn exit_code(&self) -> i32 {
        use framelet_core::Error as E;
        match self {
            LabError::ConfigParse(_) => 2,
            LabError::Io { .. } => 3,
            LabError::Parse { .. } => 4,
            LabError::Core(e) => match e {
                E::InvalidSpec(_) => 10,
                E::DegenerateGraph(_) => 11,
                E::FileParse { .. } => 12,
                E::NotSymmetric { .. } => 13,
                E::NoConvergence { .. } => 14,
                E::DimensionMismatch(_) => 15,
                E::OutOfRange(_) => 16,
                E::BandMismatch => 17,
                E::VariantNotTight => 18,
                E::WeightsNotShared => 19,
                E::NumericOverflow { .. } => 20,
                E::IllegalRenormalize => 21,
                E::ZeroState => 22,
                E::TraceNotNormalized => 23,
            },
        }
    }
}
