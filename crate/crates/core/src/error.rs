use thiserror::Error;

/// Errors raised by constructions, metric computations and the displacement lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A query reached past the radius inside which the window is known to be complete.
    #[error("incomplete window: requested radius {requested} exceeds complete radius {available}")]
    IncompleteWindow { requested: f64, available: f64 },

    #[error("{0} is outside the domain of the growth function (domain_min = {1})")]
    Domain(f64, f64),

    #[error("value {0} is outside the range of the growth function")]
    Range(f64),

    #[error("radius schedule infeasible: {0}")]
    ScheduleInfeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The explicit map has no image for a source that lies inside the requested ball.
    #[error("incomplete map: no image recorded for a source of norm {0}")]
    IncompleteMap(f64),

    #[error("no complete matching under radius cap {cap}: maximum cardinality {achieved} of {needed}")]
    InfeasibleUnderCap {
        cap: f64,
        achieved: usize,
        needed: usize,
    },

    #[error("instance too large for enumeration: {0} sources (limit 8)")]
    TooLarge(usize),

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for NetError {
    fn from(e: std::io::Error) -> Self {
        NetError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for NetError {
    fn from(e: serde_json::Error) -> Self {
        NetError::Format(e.to_string())
    }
}

impl From<csv::Error> for NetError {
    fn from(e: csv::Error) -> Self {
        NetError::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NetError>;
