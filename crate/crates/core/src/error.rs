use crate::algebra::ParseError;
use crate::normal_form::NormalFormError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("solver failure at step {step}: {message}")]
    Solver { step: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("search failure: {message} (window [{lo}, {hi}])")]
    Search { message: String, lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Iteration { iterations: usize, residual: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Solver { .. } => "solver_failure",
            Error::Config(_) => "config_error",
            Error::Domain(_) => "domain_error",
            Error::Search { .. } => "search_failure",
            Error::Iteration { .. } => "iteration_failure",
            Error::Parse(_) => "parse_error",
            Error::NormalForm(_) => "normal_form_error",
            Error::Io { .. } => "io_error",
            Error::Format(_) => "format_error",
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
