use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why two configurations failed the orbit-equivalence check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotEquivalentReason {
    /// The recovered map does not have determinant one, so the leading volumes differ.
    DeterminantMismatch { det: f64 },
    /// The recovered map sends point `index` (0-based) too far from its target.
    Residual {
        index: usize,
        residual: f64,
        allowed: f64,
    },
}

impl fmt::Display for NotEquivalentReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DeterminantMismatch { det } => write!(f, "determinant mismatch (det g = {det})"),
            Self::Residual {
                index,
                residual,
                allowed,
            } => {
                write!(
                    f,
                    "residual {residual:e} at point {index} exceeds {allowed:e}"
                )
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate input: the first d points are linearly dependent")]
    DegenerateInput,
    #[error("configurations are not equivalent: {0}")]
    NotEquivalent(NotEquivalentReason),
    #[error("chart boundary: |t| = {t:e} is not above the floor {floor:e}")]
    ChartBoundary { t: f64, floor: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exhaustive enumeration of {tuples} tuples exceeds the budget of {budget}; use sampled mode")]
    BudgetExceeded { tuples: u128, budget: u64 },
    #[error("scale j = {j} needs frequencies up to 2^{} but the grid resolves at most {nyquist}", j + 2)]
    NyquistViolation { j: u32, nyquist: f64 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    /// Domain errors are caused by the data (degenerate input, budgets), not by usage.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInput
                | Error::NotEquivalent(_)
                | Error::ChartBoundary { .. }
                | Error::BudgetExceeded { .. }
                | Error::NyquistViolation { .. }
        )
    }
}
