//! Exact computer algebra for commutative BV∞ algebras.
//!
//! Everything is computed over the rationals on explicit truncations; every
//! check reports the range it actually swept.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod linalg;
pub mod hodge;
pub mod mc;
pub mod morphisms;
pub mod operators;
pub mod probe;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
