use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user-facing input: parameters, indices, config entries.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("non-finite potential {value} at grid point {index} (r = {r} Å)")]
    NonFinitePotential { index: usize, r: f64, value: f64 },

    #[error("level index {index} out of range for {what} (retained: {available})")]
    LevelOutOfRange {
        what: &'static str,
        index: usize,
        available: usize,
    },

    #[error("grid does not contain {state}: {detail}")]
    GridTooSmall { state: String, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for validation problems, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::GridTooSmall { .. } => 2,
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}
