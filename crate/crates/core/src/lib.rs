pub mod cli;
pub mod error;
pub mod fedosov;
pub mod geometry;
pub mod jets;
pub mod sampling;
pub mod wick;

pub use error::{Error, Result};
