//! Embeds finite-dimensional complex quantum models into real quantum theory
//! and checks numerically that every observable statistic survives.

pub mod embedding;
pub mod error;
pub mod matrix;
pub mod network;
pub mod protocol;
pub mod random;
pub mod witness;

pub use error::{Error, Result};
