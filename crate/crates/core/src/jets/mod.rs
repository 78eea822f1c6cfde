//! Exact arithmetic on truncated multivariate Taylor expansions.

mod jet;
mod matrix;
mod multi_index;
pub mod scalar;

pub use jet::{Jet, JetOp};
pub use matrix::{invert_constant, JetMatrix};
pub use multi_index::{MultiIndex, MAX_DIM};
pub use scalar::{GaussianRational, Rational};
