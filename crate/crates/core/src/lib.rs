//! Exact arithmetic for Fermat-type equations over cyclotomic layers:
//! primality and Wieferich tests, polynomials over finite fields and Q,
//! number fields, layer construction, S-unit search and hypothesis checks.

pub mod arith;
pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod fieldspec;
pub mod hypothesis;
pub mod numberfield;
pub mod polyfp;
pub mod polyq;
mod serde_big;
pub mod sunit;

pub use error::{Error, Result};
