//! Exact coordinate invariants of projective structures, conformal structures
//! and Weyl connections, built on the `symkernel` rational-function kernel.
//!
//! Every verdict ultimately reduces to an exact zero test of a rational
//! function; floating point appears only in the geodesic integrator and the
//! numeric cross-check of the quartic classifier.

pub mod affine;
pub mod confweyl;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod metrizability;
pub mod projective;
pub mod quartic_cr;
pub mod tensor;

pub use affine::{curvature, levi_civita, weyl_connection, Curvature, Metric, Signature, WeylStructure};
pub use error::GeomError;
pub use tensor::{Bracket, Connection, Tensor, Variance};
