use std::fmt;

use thiserror::Error;

/// Why an evaluation left the domain of the expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    LnNonPositive,
    DivisionByZero,
    PowNegativeBase,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainError::LnNonPositive => "ln-nonpositive",
            DomainError::DivisionByZero => "division-by-zero",
            DomainError::PowNegativeBase => "pow-negative-base",
        };
        f.write_str(s)
    }
}

/// Malformed expression text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: expected {expected}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(DomainError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression blowup: {nodes} nodes exceeds the cap of {cap}")]
    ExpressionBlowup { nodes: usize, cap: usize },
    #[error("unsupported integrand: {0}")]
    UnsupportedIntegrand(String),
    #[error("adaptive quadrature exceeded maximum depth {0}")]
    MaxDepthExceeded(u32),
    #[error("non-finite floating-point result")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<DomainError> for Error {
    fn from(e: DomainError) -> Self {
        Error::Domain(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
