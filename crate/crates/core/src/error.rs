use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at t = {t} in stage {stage}")]
    NumericalBlowup { t: f64, stage: usize },

    #[error("step budget of {max_steps} attempts exhausted at t = {t}")]
    StepBudgetExhausted { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t}: h = {h:e} rejected at the minimum step")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in the numerics rather than in
    /// configuration or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalBlowup { .. }
                | Error::StepBudgetExhausted { .. }
                | Error::StepSizeUnderflow { .. }
        )
    }
}
