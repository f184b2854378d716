use thiserror::Error;

/// Rarefaction family index that failed during pattern construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FailedFamily {
    One,
    Three,
    Both,
}

impl std::fmt::Display for FailedFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailedFamily::One => write!(f, "1-family"),
            FailedFamily::Three => write!(f, "3-family"),
            FailedFamily::Both => write!(f, "1- and 3-families"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration is not R1-CD-R3: {family} would need a shock")]
    NotRarefactionContact { family: FailedFamily },

    #[error("configuration is not R1-CD-R3: the data generate vacuum")]
    Vacuum,

    #[error("numerical abort at t = {time}, cell {cell}: {reason}")]
    NumericalAbort {
        time: f64,
        cell: usize,
        reason: String,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True for failures of a numerical run rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalAbort { .. } | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
