//! Inexact first-order methods for nonconvex, nonsmooth problems, with
//! per-iterate certification of the descent, relative-error, Lyapunov and
//! finite-length properties that govern their convergence.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod oracles;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
