use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] culturomics_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {reason}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("provider error: {0}")]
    Provider(String),
    #[error("malformed provider payload: {reason}")]
    Parse { reason: String, raw: String },
    #[error("classifier backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("no extractor produced at least {min_chars} characters")]
    ExtractionFailed { min_chars: usize },
    #[error("full text unavailable for {url}: {reason}")]
    FullTextUnavailable { url: String, reason: String },
    #[error("stage {stage} needs stage {missing} to have completed first")]
    Dependency { stage: String, missing: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
