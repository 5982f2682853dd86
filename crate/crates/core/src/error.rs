use thiserror::Error;

/// Broad class of a failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Infeasible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid loop {ring} of part {part}: {reason}")]
    InvalidLoop {
        part: usize,
        ring: usize,
        reason: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("no insertable tool: no catalog tool has a diameter <= {max_diameter:.3} mm")]
    NoInsertableTool { max_diameter: f64 },
    #[error("no plunge room: helix radius {available:.3} mm is below the minimum {required:.3} mm")]
    NoPlungeRoom { available: f64, required: f64 },
    #[error("stepover {stepover} mm exceeds tool diameter {diameter} mm")]
    StepoverTooLarge { stepover: f64, diameter: f64 },
    #[error("toolpath is not contiguous at move {index} (gap {gap:.6} mm)")]
    Discontinuous { index: usize, gap: f64 },
    #[error("material removal rate undefined: zero time for a non-zero volume")]
    ZeroTime,
    #[error("no strategy candidate could be evaluated: {}", .0.join("; "))]
    NoViableStrategy(Vec<String>),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NoInsertableTool { .. }
            | Error::NoPlungeRoom { .. }
            | Error::NoViableStrategy(_)
            | Error::EmptyRegion => ErrorCategory::Infeasible,
            _ => ErrorCategory::Validation,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
