//! Phase retrieval from magnitude measurements at the identifiability threshold.
//!
//! The crate is organized around five modules:
//!
//! - [`model`]: signals, measurement ensembles and the forward maps.
//! - [`polyspace`]: monomial bases, coefficient forms, degree prolongation,
//!   numerical rank decisions and catalecticant extraction.
//! - [`inversion`]: ideal-regression inversion, the lifted least-squares
//!   baseline, scale recovery and two closed-form solvers for special
//!   measurement designs.
//! - [`identifiability`]: Jacobian rank tests, multistart solution censuses
//!   and empirical threshold sweeps.
//! - [`harness`]: reproducible Monte-Carlo experiments, CSV output,
//!   aggregation and SVG plots.

// `!(x > y)` is used deliberately so that NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod hexfloat;
pub mod identifiability;
pub mod inversion;
mod linalg;
pub mod model;
pub mod polyspace;
pub mod rng;

pub use error::{Error, Result};
