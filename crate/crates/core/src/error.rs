use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Problem size outside the dense-simulation bound.
    #[error("size error: {0}")]
    Size(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Malformed, missing or non-finite input data.
    #[error("data error: {0}")]
    Data(String),

    /// Not enough history to build a regressor or forecast.
    #[error("window error: {0}")]
    Window(String),

    /// An iterative estimator stopped without converging. `best` holds the
    /// best-so-far parameter vector.
    #[error("fit error: {message}")]
    Fit { message: String, best: Vec<f64> },

    #[error("loss error: {0}")]
    Loss(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("rolling plan error: {0}")]
    Plan(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Plan(_) | Error::Size(_) | Error::Argument(_) => 3,
            _ => 2,
        }
    }
}
