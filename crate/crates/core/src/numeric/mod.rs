//! Numeric support: extended precision, compensated sums, special functions.

pub mod dd;
pub mod scalar;
pub mod special;
pub mod sum;

pub use dd::Dd;
pub use scalar::{Mp, Scalar};
pub use sum::CompensatedSum;
