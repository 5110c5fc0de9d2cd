//! Exact and interval arithmetic, plus the sup norm and the distance to the
//! nearest integer vector.

pub mod guarded;
pub mod linalg;
pub mod parse;
pub mod scalar;

pub use guarded::Guarded;
pub use linalg::{dist_to_int, int_sup_norm, mat_vec, parse_matrix_json, sup_norm, MatrixDoc, MatrixNM, VectorN};
pub use parse::{parse_rational, parse_scalar};
pub use scalar::Scalar;

/// Working precision in fractional bits when none is given.
pub const DEFAULT_BITS: u32 = 256;
