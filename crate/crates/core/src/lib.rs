//! Maaß cusp forms for PSL(2,Z).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod error;
pub mod hejhal;
pub mod modular_domain;
pub mod number_theory;
pub mod parallel;
pub mod search;
pub mod special_functions;
pub mod statistics;

pub use error::{Error, Regime, Result};
