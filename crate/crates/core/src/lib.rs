//! Orthogonal exponential systems for the Cantor-type measures `mu_{q,b}`.
//!
//! The measure is the equal-weight self-similar measure generated by
//! `x -> (x + i)/b` for `i = 0..q`. When `q | b` its maximal orthogonal sets are
//! encoded by digit labelings of the q-adic tree ([`treemap`]); [`certify`]
//! checks orthogonality, maximality and completeness numerically.

pub mod certify;
pub mod error;
pub mod fourier;
pub mod growth;
pub mod numtheory;
pub mod treemap;

pub use error::{Error, Result};
pub use numtheory::{MeasureParams, SignedDigits, SparseDigits, Word};
