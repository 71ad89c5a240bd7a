//! Finite-population two-island Wright-Fisher and seed-bank chains, their
//! exact stationary moments, the two-island diffusion (TI) stationary
//! moments, and explicit Stein-method approximation bounds.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs apart from the Monte Carlo routines, which take an explicit
//! generator so that callers control streams and parallelism.
//!
//! Module map:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`chain`] | chain parameters, one-step sampling, conditional drifts, long runs |
//! | [`moments`] | factorial moments, moment-transfer matrices, exact stationary moments |
//! | [`ti`] | diffusion generator on monomials, TI moments, large-migration limits |
//! | [`dual`] | dual jump process, urn occupancy, closed-form and quadrature integrals |
//! | [`stein`] | Stein factors, error terms, bound assembly |
//! | [`beta`] | Beta moments and parameter maps |
//! | [`regime`] | asymptotic parameter families indexed by `N` |
//! | [`distance`] | exact distances between chain moments and the reference laws |

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod beta;
pub mod chain;
pub mod distance;
pub mod dual;
mod error;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod quad;
pub mod regime;
pub mod scalar;
pub mod stats;
pub mod stein;
pub mod ti;

pub use crate::error::{Error, Result};

pub use crate::beta::BetaParams;
pub use crate::chain::{ChainParams, ChainState, ModelKind, RngSeed};
pub use crate::moments::{MomentIndex, MomentTable, MomentTransfer};
pub use crate::regime::ScalingRegime;
pub use crate::stein::{BoundBreakdown, HNorms, SteinFactors};
pub use crate::ti::TIParams;
