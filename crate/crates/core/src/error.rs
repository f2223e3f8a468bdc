use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("interval [{a}, {b}] outside domain [{lo}, {hi}]")]
    OutOfDomain { a: Rat, b: Rat, lo: Rat, hi: Rat },
    #[error("polynomial {0} has an irrational root in range")]
    IrrationalRoot(String),
    #[error("root finding unsupported for degree {0}")]
    UnsupportedDegree(usize),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("divisor is not pseudo-effective: {0}")]
    NotPseudoEffective(String),
    #[error("blowup of an orbifold configuration is not supported")]
    NotSmooth,
    #[error("inconsistent incidence: {0}")]
    InconsistentIncidence(String),
    #[error("case {case} not certified: {reason}")]
    NotCertified { case: String, reason: String },
    #[error("oracle found {0} distinct negative parts")]
    Ambiguous(usize),
    #[error("oracle found no admissible subset")]
    NoSolution,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singularity input: {0}")]
    Singularity(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
