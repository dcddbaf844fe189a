use thiserror::Error;

/// Errors raised while building matrices or evaluating asymptotic quantities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid coefficient at index {index}: {reason}")]
    InvalidCoefficient { index: usize, reason: String },

    #[error("degenerate measure: orthonormal polynomial of degree {degree} has vanishing norm")]
    DegenerateMeasure { degree: usize },

    #[error("index out of range: {0}")]
    Bounds(String),

    #[error(
        "truncation contamination: entry ({index},{index}) of the power {power} \
         depends on rows beyond the truncation size {size}"
    )]
    TruncationContamination {
        index: usize,
        power: usize,
        size: usize,
    },

    #[error("pole: P_{degree} vanishes at z = {z}")]
    Pole { degree: usize, z: String },

    #[error("eigensolver did not converge for the {degree}x{degree} truncation")]
    EigenNonConvergence { degree: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures that come out of the numerics rather than from bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMeasure { .. }
                | Error::TruncationContamination { .. }
                | Error::Pole { .. }
                | Error::EigenNonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
