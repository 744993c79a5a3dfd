//! Qudit-assisted CNOT and Toffoli gates: circuit-model constructions on
//! mixed-radix registers and their linear-optical post-selection schemes.

pub mod error;
pub mod optics;
pub mod qudit;
pub mod rational;
pub mod schemes;
pub mod synthesis;

pub use error::{Error, Result};
