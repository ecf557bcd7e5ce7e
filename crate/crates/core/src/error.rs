use alloc::string::String;
use core::fmt;

/// Which Bessel evaluator a value (or a failure) came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Regime {
    Quadrature,
    Hankel,
    Uniform,
    Transitional,
    Debye,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::Quadrature => "quadrature",
            Regime::Hankel => "hankel",
            Regime::Uniform => "uniform",
            Regime::Transitional => "transitional",
            Regime::Debye => "debye",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    Domain(String),
    /// An asymptotic evaluator was called outside the range where it is usable.
    Regime { regime: Regime, r: f64, x: f64 },
    /// A coefficient index beyond the precomputed table depth.
    Table { index: usize, depth: usize },
    /// Adaptive quadrature exhausted its node budget.
    Convergence { r: f64, x: f64, estimate: f64, error: f64 },
    /// Pullback did not reach the fundamental domain within the iteration cap.
    Geometry { x: f64, y: f64, iterations: usize },
    /// Bessel evaluation failed while assembling the linear system.
    Matrix { m: usize, n: usize, x: f64, source: alloc::boxed::Box<Error> },
    /// Too many rank-deficient pivots in the inhomogeneous solve.
    IllConditioned { r: f64, deficient: usize, total: usize },
    /// Input vector was all zeros or otherwise unusable.
    Degenerate(&'static str),
    /// Two vectors that must have equal length did not.
    LengthMismatch { left: usize, right: usize },
    /// The adaptive r-grid step shrank below the configured floor.
    Stall { r: f64, step: f64 },
    /// A statistic was requested for an empty sample.
    Empty(&'static str),
    /// A configuration value is invalid.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Regime { regime, r, x } => {
                write!(f, "{regime} expansion is not usable at r={r}, x={x}")
            }
            Error::Table { index, depth } => {
                write!(f, "coefficient index {index} exceeds table depth {depth}")
            }
            Error::Convergence { r, x, estimate, error } => write!(
                f,
                "K-Bessel quadrature did not converge at r={r}, x={x} (estimate {estimate:e}, error {error:e})"
            ),
            Error::Geometry { x, y, iterations } => write!(
                f,
                "pullback of {x}+{y}i did not reach the fundamental domain in {iterations} iterations"
            ),
            Error::Matrix { m, n, x, source } => {
                write!(f, "matrix entry (m={m}, n={n}) at sample x={x}: {source}")
            }
            Error::IllConditioned { r, deficient, total } => write!(
                f,
                "system at r={r} is ill-conditioned: {deficient} of {total} pivots below tolerance"
            ),
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::Stall { r, step } => {
                write!(f, "r-grid stalled at r={r}: step {step:e} below floor")
            }
            Error::Empty(what) => write!(f, "empty input: {what}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Matrix { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
