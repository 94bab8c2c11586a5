use num_rational::BigRational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} is outside the domain [-1, oo)")]
    Domain { value: BigRational },

    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Two independent computations disagreed. This is a bug, not bad input.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("invalid subgroup data: {0}")]
    InvalidSubgroup(String),

    #[error("invalid Sen profile: {0}")]
    InvalidProfile(String),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("sequence is not stable in the supplied range (first deviation at level {offending})")]
    NotStable {
        /// Residual of every supplied level against the fit of the first three points.
        residuals: Vec<(i64, BigRational)>,
        offending: i64,
    },

    #[error("invalid ramification data: {0}")]
    InvalidRamificationData(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("closure exceeded the element budget of {budget}; try a smaller n, p or m")]
    BudgetExceeded { budget: usize },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },
}
