use thiserror::Error;

use crate::soliton::ModelKind;

/// Errors raised by the stability library.
#[derive(Debug, Error)]
pub enum Error {
    /// Frequency outside the open existence interval of the soliton family.
    #[error(
        "omega = {omega} is outside the existence interval ({lo}, {hi}) of the {model} family"
    )]
    Domain {
        model: ModelKind,
        omega: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Adaptive quadrature hit its subdivision limit.
    #[error(
        "quadrature did not converge: estimated error {achieved:e} above tolerance {requested:e}"
    )]
    Quadrature { achieved: f64, requested: f64 },

    /// Shifted QR exhausted its sweep budget.
    #[error("QR iteration did not converge after {sweeps} sweeps ({unconverged} eigenvalues left in the active window)")]
    NoConvergence { sweeps: usize, unconverged: usize },

    #[error("branch not found: {0}")]
    BranchNotFound(String),

    /// A quantity proven nonzero came out (numerically) zero.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
