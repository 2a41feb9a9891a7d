use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e} \
         after {intervals} subintervals"
    )]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    /// Two routes to the same quantity disagree; this points at a formula bug
    /// rather than at bad input.
    #[error("internal consistency check `{check}` failed (residual {residual:e})")]
    Inconsistent { check: &'static str, residual: f64 },

    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
