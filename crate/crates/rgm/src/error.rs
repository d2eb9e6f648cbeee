// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = RgmError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum RgmError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rgm_core::Error),
    #[error("{0}")]
    Format(String),
}

impl RgmError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, reason: impl Into<String>) -> Self {
        Self::Parse { path: path.into(), line, reason: reason.into() }
    }

    /// Stable machine-readable category.
    pub fn category(&self) -> &'static str {
        use rgm_core::Error as E;
        match self {
            Self::Io { .. } => "io",
            Self::Parse { .. } => "parse",
            Self::Config(_) => "config",
            Self::Format(_) => "format",
            Self::Core(e) => match e {
                E::EmptyGraph
                | E::NodeOutOfRange { .. }
                | E::TooManyNodes(_)
                | E::DuplicateEdge { .. }
                | E::SelfLoop(_)
                | E::LabelCount { .. } => "graph",
                E::EmptySubset
                | E::SubsetTooLarge { .. }
                | E::DuplicateMember(_)
                | E::SubsetShape { .. }
                | E::MemberOutOfRange { .. } => "subset",
                E::InvalidParameter { .. } | E::LengthMismatch { .. } | E::DenseCapExceeded { .. } => "parameter",
                E::NotConverged { .. }
                | E::EigenStagnation { .. }
                | E::SeriesNotConverged { .. }
                | E::Singular => "convergence",
            },
        }
    }
}

impl From<csv::Error> for RgmError {
    fn from(e: csv::Error) -> Self {
        Self::Format(e.to_string())
    }
}

impl From<serde_json::Error> for RgmError {
    fn from(e: serde_json::Error) -> Self {
        Self::Format(e.to_string())
    }
}
