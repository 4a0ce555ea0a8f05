use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A distribution or scheme parameter is outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A function argument is outside the domain where it is defined.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// Malformed tabulated data or distribution string.
    #[error("format error: {0}")]
    Format(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial value {partial}, error estimate {abs_error})"
    )]
    Quadrature {
        partial: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    /// A construction-time consistency check failed (e.g. pdf mass != 1).
    #[error("consistency check failed: {0}")]
    Check(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
