//! Exact multivariate rational functions over the rationals.
//!
//! Every expression is a canonical quotient of integer polynomials, so the
//! zero test is structural and exact. Polynomial gcds use a modular algorithm
//! over word-sized primes.

mod chart;
mod error;
mod expr;
mod gcd;
mod modp;
mod monomial;
mod parse;
mod poly;
mod print;

pub use chart::{Chart, DEFAULT_DEGREE_BOUND};
pub use error::SymError;
pub use expr::Expr;
pub use gcd::gcd;
pub use monomial::{Monomial, MAX_EXPONENT, MAX_VARS};
pub use poly::IntPoly;
pub use print::render_poly;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Shorthand for the rational `n / d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
