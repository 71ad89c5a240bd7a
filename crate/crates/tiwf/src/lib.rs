//! Experiment driver for the two-island Wright-Fisher and seed-bank bounds:
//! grid verification, scaling studies, cross-checks and small inspection
//! tables. The `tiwf` binary is a thin argument layer over this library.

#![forbid(unsafe_code)]

pub mod config;
pub mod crosscheck;
pub mod error;
pub mod eval;
pub mod inspect;
pub mod oracle;
pub mod report;
pub mod scaling;
pub mod testfn;
pub mod verify;

pub use crate::error::{AppError, AppResult};

/// Exit status when every computation ran but a checked inequality or
/// tolerance failed.
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 1;
