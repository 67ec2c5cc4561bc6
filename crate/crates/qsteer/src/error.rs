use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] qsteer_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use qsteer_core::Error as C;
        match self {
            Error::Config(_) | Error::Format { .. } | Error::Json(_) => 2,
            Error::Core(
                C::NoProperPolicy(_) | C::StateExplosion(_) | C::NotConverged { .. } | C::HorizonTooShort { .. },
            ) => 3,
            Error::Core(_) => 2,
            Error::Io(_) | Error::Csv(_) | Error::Pool(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
