use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("matrix is numerically singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires a {expected} system")]
    WrongSystemKind { expected: &'static str },

    #[error("step size {dt} exceeds the stability bound {max_dt}")]
    StepSize { dt: f64, max_dt: f64 },

    #[error("state became non-finite at t = {t} (step {step})")]
    NonFinite { t: f64, step: usize },

    #[error("window of length {length} is shorter than one period {period}")]
    WindowTooShort { length: f64, period: f64 },

    #[error("secular model requires {param}: {reason}")]
    LockViolation { param: &'static str, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation { field, reason: reason.into() }
    }

    /// Stable machine-readable tag, used by the CLI error record and the C status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation",
            Error::Singular { .. } => "singular",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::WrongSystemKind { .. } => "wrong_system_kind",
            Error::StepSize { .. } => "step_size",
            Error::NonFinite { .. } => "non_finite",
            Error::WindowTooShort { .. } => "window_too_short",
            Error::LockViolation { .. } => "lock_violation",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
