//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by parameter validation, oracles, transforms and the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    /// The positivity parameter is not admissible for the given stability index.
    #[error(
        "rho = {rho} is not admissible for alpha = {alpha}; admissible interval is [{lo}, {hi}]"
    )]
    InconsistentRho {
        alpha: f64,
        rho: f64,
        lo: f64,
        hi: f64,
    },

    /// An argument lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A coefficient or path value violates strict positivity.
    #[error("non-positive value: {0}")]
    NonPositive(String),

    /// The underlying path is too short for the requested clock and has not plateaued.
    #[error(
        "path exhausted: clock reached {reached} of requested {requested}; extend the horizon"
    )]
    ExhaustedPath { reached: f64, requested: f64 },

    /// A skeleton value is exactly zero where an inversion x -> 1/x is required.
    #[error("path hits zero exactly at time {time}")]
    HitZero { time: f64 },

    /// The requested quantity degenerates for alpha = 1.
    #[error("alpha = 1 is degenerate for this quantity")]
    Alpha1,

    /// The oracle branch does not apply to the given parameters.
    #[error("wrong branch: {0}")]
    WrongBranch(String),

    /// A numerator gamma function is evaluated at one of its poles.
    #[error("pole of a numerator gamma factor at z = {re} + {im}i")]
    PoleHit { re: f64, im: f64 },

    /// A statistical comparison received fewer samples than it needs.
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    /// A request falls outside the supported scope (for example alpha = 2).
    #[error("out of scope: {0}")]
    OutOfScope(String),

    /// Malformed textual input (sigma specification, CSV table, configuration).
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem or serialization failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
