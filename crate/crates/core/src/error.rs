use alloc::string::String;
use alloc::vec::Vec;

use crate::lp::LpStatus;

/// Errors produced by the geometry, LP and foliation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("linear program is {0:?}")]
    LpStatus(LpStatus),

    #[error("parameter |zeta| = {0} lies outside the closed unit disk")]
    OutsideParameterDisk(f64),

    #[error("{what} did not converge (best residual {residual:e})")]
    Convergence {
        what: &'static str,
        residual: f64,
        /// Last iterate, in whatever coordinates the failing routine uses.
        last_iterate: Vec<f64>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::DegenerateBody(msg.into())
}
