use thiserror::Error;

use crate::integrator::SimState;

#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate or time outside the ambient cylinder.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Picard iteration for the logarithmic term stalled.
    #[error("picard iteration stalled at t = {t}: relative increment {residual:.3e} after {iters} iterations")]
    PicardStall { t: f64, residual: f64, iters: usize },

    /// A non-finite coefficient appeared; `last` is the last finite snapshot.
    #[error("solution diverged at t = {t}")]
    Divergence { t: f64, last: Box<SimState> },

    /// Two routes to the same quantity disagree.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
