//! Process-level error type: wraps every failure a command can hit and
//! assigns the stable exit-code contract.

use std::path::{Path, PathBuf};

/// Exit codes: 0 success, 2 usage/IO/format, 3 degenerate fit, 4 non-road
/// geometry, 5 invalid evaluation input.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ptroad_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or unsupported input bytes (PNG structure, color type,
    /// bit depth, JSON syntax).
    #[error("{0}")]
    Decode(String),

    #[error("png encoding failed: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("{0}")]
    Usage(String),

    /// Prefixes an error with the file it came from.
    #[error("{path}: {source}")]
    WithPath {
        path: PathBuf,
        #[source]
        source: Box<CliError>,
    },

    /// Prefixes an error with the pipeline stage that raised it.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn decode(msg: impl Into<String>) -> Self {
        CliError::Decode(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// `err.map_err(CliError::at_path(path))` annotates an error with its file.
    pub fn at_path(path: &Path) -> impl FnOnce(CliError) -> CliError + '_ {
        move |source| CliError::WithPath { path: path.to_path_buf(), source: Box::new(source) }
    }

    /// `err.map_err(CliError::in_stage("fit"))` annotates an error with its stage.
    pub fn in_stage(stage: &'static str) -> impl FnOnce(CliError) -> CliError {
        move |source| CliError::Stage { stage, source: Box::new(source) }
    }

    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ptroad_core::Error::DegenerateFit(_)) => 3,
            CliError::Core(ptroad_core::Error::NonRoadGeometry { .. }) => 4,
            CliError::Core(ptroad_core::Error::UndefinedRecall) => 5,
            CliError::WithPath { source, .. } | CliError::Stage { source, .. } => {
                source.exit_code()
            }
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
