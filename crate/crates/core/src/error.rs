use thiserror::Error;

/// Errors raised by the constructions in this crate.
///
/// Variants map onto CLI exit codes: precondition failures exit with 2,
/// inconclusive verdicts with 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative input {0}: normalize the slope to be positive and swap generators")]
    Negative(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("line hits a lattice point at crossing {index}; perturb the start height")]
    LatticeHit { index: usize },
    #[error("approximation too coarse: {0}")]
    TooCoarse(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("exact query refused in log-domain: {0}")]
    LogDomain(String),
    #[error("measure bound fails at index {index}: {reason}")]
    MeasureBound { index: usize, reason: String },
    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconclusive(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
