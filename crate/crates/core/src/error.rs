use thiserror::Error;

/// Errors raised by the q-series kernels, polynomial toolkit and OPUC builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate lower parameter: factor (1 - C q^{index}) vanishes")]
    DegenerateLowerParameter { index: usize },

    #[error("no convergence after {terms} terms/steps")]
    NoConvergence { terms: usize },

    #[error("division by near-zero value (modulus {modulus:e})")]
    DivisionByNearZero { modulus: f64 },

    #[error("polynomial degree {degree} exceeds formal degree {formal}")]
    DegreeOverflow { degree: usize, formal: usize },

    #[error("root refinement failed: scaled residual {residual:e}")]
    IllConditioned { residual: f64 },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("division by (z - 1) is not exact: remainder {remainder:e}")]
    NonExactDivision { remainder: f64 },

    #[error("chain parameter {name}_{index} = {value} lies outside its admissible range")]
    ParameterOutOfRange {
        name: &'static str,
        index: usize,
        value: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
