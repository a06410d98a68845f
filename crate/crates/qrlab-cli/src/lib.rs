//! Library face of the experiment runner; the `qrlab` binary is a thin
//! wrapper over these modules.

pub mod config;
pub mod emit;
pub mod error;
pub mod interp;
pub mod records;
pub mod run;
