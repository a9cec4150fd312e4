use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config {path}:{line}: {message}")]
    ConfigParse { path: String, line: usize, message: String },
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] cqed_core::Error),
    #[error("cutoff ceiling: {model} at eta = {eta} not converged below dimension cap (last cutoff {cutoff})")]
    CutoffCeiling { model: String, eta: f64, cutoff: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Process exit status: 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ConfigParse { .. } | Error::Validation(_) | Error::Io { .. } => 1,
            Error::Core(cqed_core::Error::InvalidParameter { .. }) => 1,
            Error::Core(_) | Error::CutoffCeiling { .. } | Error::Invariant(_) | Error::ThreadPool(_) => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
