use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("negative temperature {0}")]
    NegativeTemperature(f64),

    /// The even-parity block is degenerate (gap closes at this momentum).
    #[error("degenerate momentum block at phi = {phi} (Lambda = {lambda:e})")]
    DegenerateBlock { phi: f64, lambda: f64 },

    #[error("two-site state is not a valid density matrix (min eigenvalue {min_eigenvalue:e})")]
    InvalidState { min_eigenvalue: f64 },

    #[error("density matrix is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("response is flat (max {max:e} over the time window)")]
    FlatResponse { max: f64 },

    #[error("zero-temperature response {0:e} too small to normalise by")]
    ZeroDenominator(f64),

    #[error("chain of {0} sites is outside the supported range 2..=12")]
    TooLarge(usize),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors that signal a numerical/convention failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvalidState { .. } | Error::NotPositive { .. } | Error::NonFinite(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
