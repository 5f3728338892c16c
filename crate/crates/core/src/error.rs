use thiserror::Error;

/// Failures reported by the solvers. Numerical refusals carry enough context to act on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} outside path range [0, {end}]")]
    OutOfRange { t: f64, end: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("CFL condition violated in block {block}: {detail}")]
    Cfl { block: usize, detail: String },
    #[error("integration failed at t = {t}: {detail}")]
    Integration { t: f64, detail: String },
    #[error("flow degenerate: {0}")]
    FlowDegenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn pre<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
