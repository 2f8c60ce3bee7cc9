use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Plus and star transforms blow up logarithmically at the origin.
    #[error("logarithmic singularity at r = 0")]
    LogSingularity,

    #[error("quadrature did not converge: estimate {estimate:e} with error bound {error:e}")]
    NonConvergence { estimate: f64, error: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("sequence too short: need at least {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("grid resolves degree {max} but degree {requested} was requested")]
    UnderResolved { requested: usize, max: usize },

    #[error("weight rejected: {0}")]
    WeightRejected(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
