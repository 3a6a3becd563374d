use std::fmt;

/// Errors raised by the numerical kit and the analytic/simulation layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of a function or model.
    Domain {
        what: &'static str,
        detail: String,
    },
    /// A series, continued fraction or iteration failed to converge.
    NoConvergence {
        what: &'static str,
        detail: String,
    },
    /// Adaptive quadrature could not meet its tolerance.
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    /// A result that should be a probability (or otherwise bounded) left its
    /// range by more than the allowed rounding slack.
    OutOfRange {
        what: &'static str,
        value: f64,
    },
    /// A formula branch the model does not provide.
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NoConvergence {
            what,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, detail } => write!(f, "{what}: {detail}"),
            Error::NoConvergence { what, detail } => write!(f, "{what} did not converge: {detail}"),
            Error::Quadrature {
                estimate,
                error,
                subdivisions,
            } => write!(
                f,
                "quadrature tolerance not met after {subdivisions} subdivisions \
                 (estimate {estimate:e}, error {error:e})"
            ),
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value:e}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
