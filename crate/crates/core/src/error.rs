use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by evaluation, quadrature and the verification harness.
///
/// Every variant maps to a stable machine-readable code via [`Error::code`],
/// which is what verification reports record for failed cases.
#[derive(Debug, Error)]
pub enum Error {
    #[error("product or series does not converge: {0}")]
    NonConvergent(String),
    #[error("truncation needs {needed} terms, budget is {budget}")]
    TruncationBudgetExceeded { needed: usize, budget: usize },
    #[error("argument {re}{im:+}i lies on a pole")]
    Pole { re: f64, im: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("denominator parameter hits q^-{n} before the series terminates")]
    DivergentDenominator { n: usize },
    #[error("no circle separates the pole families (inward max {inward_max:.6e}, outward min {outward_min:.6e})")]
    NoSeparatingCircle { inward_max: f64, outward_min: f64 },
    #[error("quadrature did not converge with {n_used} samples (last difference {err:.3e})")]
    NoConvergence { n_used: usize, err: f64 },
    #[error("normalising denominator vanishes: {0}")]
    DenominatorZero(String),
    #[error("exponents outside the limit polytope: {0}")]
    OutsidePolytope(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write report to {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConvergent(_) => "NONCONVERGENT",
            Error::TruncationBudgetExceeded { .. } => "TRUNCATION_BUDGET",
            Error::Pole { .. } => "POLE",
            Error::Domain(_) => "DOMAIN",
            Error::DivergentDenominator { .. } => "DIVERGENT_DENOMINATOR",
            Error::NoSeparatingCircle { .. } => "NO_SEPARATING_CIRCLE",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::DenominatorZero(_) => "DENOMINATOR_ZERO",
            Error::OutsidePolytope(_) => "OUTSIDE_POLYTOPE",
            Error::UnknownSuite(_) => "UNKNOWN_SUITE",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::Io { .. } => "IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
