use thiserror::Error;

/// Errors raised anywhere in the testing pipeline.
///
/// Every variant maps to a stable machine-readable [`Error::code`] so that
/// command-line front ends can report failures without string matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two objects (or an object and a dataset) disagree on shape or kind.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A metric object or dataset violates a structural invariant.
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },

    /// A group has no subject with two or more repeated measures, so its
    /// within-subject variability is undefined.
    #[error(
        "group '{group}' has no subject with r_i >= 2; within-subject variability is undefined \
         (every group needs at least one subject with two or more repeated measures, \
         or run the reduced test without the within-subject term)"
    )]
    NoRepeatedMeasures { group: String },

    /// A variance estimate vanished, so the statistic cannot be standardized.
    #[error("calibration error in group '{group}': {message}")]
    Calibration { group: String, message: String },

    /// A numerical routine failed.
    #[error("numerical error: {0}")]
    Numeric(String),

    /// Malformed input file.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn calibration(group: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Calibration {
            group: group.into(),
            message: message.into(),
        }
    }

    /// Stable identifier for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Domain(_) => "domain",
            Error::Validation { .. } => "validation",
            Error::NoRepeatedMeasures { .. } => "no_repeated_measures",
            Error::Calibration { .. } => "calibration",
            Error::Numeric(_) => "numeric",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }

    /// Attach a location prefix (group / subject / replicate) to the message.
    pub fn context(self, ctx: impl AsRef<str>) -> Self {
        let ctx = ctx.as_ref();
        match self {
            Error::Shape(m) => Error::Shape(format!("{ctx}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Validation { location, message } => Error::Validation {
                location: format!("{ctx}/{location}"),
                message,
            },
            Error::Numeric(m) => Error::Numeric(format!("{ctx}: {m}")),
            Error::Io(m) => Error::Io(format!("{ctx}: {m}")),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
