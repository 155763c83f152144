//! Stability of iterated quadratic maps over ℚ and over rational function
//! fields of odd characteristic.

pub mod arith;
pub mod census;
mod error;
pub mod field;
pub mod funcfield;
pub mod modpoly;
pub mod poly;
pub mod primitive;
pub mod quadmap;
pub mod serde_int;

pub use error::{Error, Result};
