//! Random-matrix ensembles over the real, complex and quaternion fields,
//! products of independent matrices, Monte Carlo averages of characteristic
//! polynomials, and the closed-form series, contour and circular-ensemble
//! representations those averages are checked against.

// `!(x > bound)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analytic;
pub mod charpoly;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
