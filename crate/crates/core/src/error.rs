use alloc::string::String;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("`{name}` = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("empty interval [{a}, {b}]")]
    EmptyInterval { a: i64, b: i64 },
    #[error("site {site} outside window [{a}, {b}]")]
    SiteOutsideWindow { site: i64, a: i64, b: i64 },
    #[error("size {got} unsupported, allowed {min}..={max}")]
    UnsupportedSize { got: usize, min: usize, max: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("eigensolver stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("refusing to evaluate: {0}")]
    Refused(String),
    #[error("internal check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit_open(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected: "(0, 1)",
        })
    }
}
