use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// The exact result exceeds the largest finite `f64`.
    #[error("overflow in {op}: ln(result) = {log_value:.3}")]
    Overflow { op: &'static str, log_value: f64 },

    /// The exact result is below the smallest positive normal `f64`.
    #[error("underflow in {op}: ln(result) = {log_value:.3}")]
    Underflow { op: &'static str, log_value: f64 },

    #[error("boundary matrix is singular at lambda = {lambda} (lambda is a bound-state location)")]
    SingularBoundaryMatrix { lambda: f64 },

    #[error("boundary matrix is ill conditioned at lambda = {lambda}: condition estimate {condition:.3e}")]
    IllConditioned { lambda: f64, condition: f64 },

    #[error("quadrature did not converge: estimate {estimate}, achieved error {achieved_error:.3e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: f64,
        achieved_error: f64,
        subdivisions: usize,
    },

    #[error("eigencurve still negative at lambda = {lambda} after the expansion cap")]
    MaxExpansionExceeded { lambda: f64 },

    #[error("boundary fit residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    FitResidual { residual: f64, tolerance: f64 },

    #[error("config syntax error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config constraint violated for key `{key}`: {constraint}")]
    ConfigConstraint { key: String, constraint: String },

    #[error("unknown command `{0}`")]
    UnknownCommand(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::Underflow { .. }
                | Error::SingularBoundaryMatrix { .. }
                | Error::IllConditioned { .. }
                | Error::Quadrature { .. }
                | Error::MaxExpansionExceeded { .. }
                | Error::FitResidual { .. }
        )
    }
}
