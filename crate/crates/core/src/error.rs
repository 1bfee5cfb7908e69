use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size limit exceeded: {what} = {got}, maximum is {max}")]
    Size {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not unitary: max |U†U - I| = {residual:.3e} (tolerance {tolerance:.0e})")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index out of range: {what} = {index}, must be below {bound}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("numeric range error: {0}")]
    NumericRange(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn size(what: &'static str, got: usize, max: usize) -> Self {
        Error::Size { what, got, max }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 is a usage problem, 3 a validation failure, 4 a numeric-range failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Size { .. } | Error::Domain(_) => 2,
            Error::Dimension(_)
            | Error::NotUnitary { .. }
            | Error::NonFinite { .. }
            | Error::InvalidPermutation(_)
            | Error::OutOfRange { .. }
            | Error::Config(_)
            | Error::Json(_) => 3,
            Error::NumericRange(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
