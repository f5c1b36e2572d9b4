use alloc::string::String;
use core::fmt;

use crate::geometry::Parabolicity;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Adaptive quadrature ran out of its subdivision budget.
    NonConvergence { subdivisions: usize, estimate: f64, error: f64 },
    /// An improper integral does not decay fast enough to converge.
    Divergence { reason: &'static str },
    /// The ODE step size collapsed below the representable resolution.
    StepUnderflow { t: f64 },
    /// The Richardson table did not contract.
    NoiseDominated { x: f64 },
    /// An argument lies outside the domain of the operation.
    Domain { what: String },
    /// The radial and volume-growth parabolicity tests disagree.
    CriterionMismatch { radial: Parabolicity, volume_growth: Parabolicity },
    /// No level set with the requested value exists.
    RootNotBracketed { level: f64 },
    /// The requested quantity is not defined for this input.
    NotApplicable { what: &'static str },
    NotThreeDimensional { n: usize },
    InsufficientSamples { got: usize, need: usize },
    /// A model or config parameter is out of its admissible range.
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>) -> Self {
        Error::Domain { what: what.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergence { subdivisions, estimate, error } => write!(
                f,
                "quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})"
            ),
            Error::Divergence { reason } => write!(f, "divergent integral: {reason}"),
            Error::StepUnderflow { t } => write!(f, "ODE step size underflow at t = {t}"),
            Error::NoiseDominated { x } => {
                write!(f, "finite difference at x = {x} is dominated by noise")
            }
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::CriterionMismatch { radial, volume_growth } => write!(
                f,
                "parabolicity criteria disagree: radial test says {radial:?}, volume growth says {volume_growth:?}"
            ),
            Error::RootNotBracketed { level } => {
                write!(f, "no level set at value {level}")
            }
            Error::NotApplicable { what } => write!(f, "not applicable: {what}"),
            Error::NotThreeDimensional { n } => {
                write!(f, "operation requires dimension 3, got {n}")
            }
            Error::InsufficientSamples { got, need } => {
                write!(f, "need at least {need} samples, got {got}")
            }
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid parameter `{name}` = {value}: {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
