//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A power series failed to meet its tolerance within the term budget.
    #[error(
        "series did not converge after {terms} terms \
         (tail estimate {tail:.3e}, tolerance {tolerance:.3e})"
    )]
    NonConvergence {
        terms: usize,
        tail: f64,
        tolerance: f64,
    },

    /// Normalization of an identically zero amplitude vector was requested.
    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    /// Two states that must share a truncation or matrix shape do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An amplitude vector populates Fock components of a forbidden parity.
    #[error("parity violation: {0}")]
    ParityViolation(String),

    /// Photon subtraction removed every populated Fock component.
    #[error("subtracting {subtract} photons from a state truncated at {truncation} leaves no support")]
    VanishingState { subtract: usize, truncation: usize },

    /// Root bracketing failed: the two probability curves never meet.
    #[error("no crossing of the probability curves inside [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    /// Both members of a crossing pair describe the same subtracted state.
    #[error("degenerate pair: both members are {0}")]
    DegeneratePair(String),
}

impl Error {
    /// Process exit code the command-line front end maps this error to.
    /// Convergence failures are distinguished from domain problems so that
    /// callers can retry with a looser tolerance or a larger term budget.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::NonConvergence { .. } => 3,
            _ => 2,
        }
    }
}
