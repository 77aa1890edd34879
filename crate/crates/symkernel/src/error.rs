use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("total degree {degree} exceeds the configured bound {bound}")]
    DegreeBound { degree: u32, bound: u32 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("expression is not polynomial in the requested variables")]
    NotPolynomial,
}
