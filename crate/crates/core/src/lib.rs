//! Statistical kernel for log-linear and neural-network software effort models.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. It covers:
//!
//! - [`dataset`]: the Desharnais project record, completeness filtering,
//!   derived-attribute checks and summaries;
//! - [`numerics`]: a Householder least-squares solver, log-gamma, the
//!   regularized incomplete beta, Student-t / F tails and an
//!   Anderson–Darling normality test;
//! - [`regression`]: model frames, OLS with ANOVA and VIF diagnostics,
//!   bidirectional stepwise selection and effort prediction;
//! - [`ann`]: a one-hidden-layer perceptron trained by Polak–Ribière
//!   conjugate gradient with holdout early stopping;
//! - [`metrics`]: MMRE, PRED(x), RMSE, mean error and R²;
//! - [`ablation`]: the leave-one-attribute-out experiment grid and the
//!   resulting attribute ranking.
//!
//! Parsing, report rendering and the command-line front end live in the
//! `effortlab` crate.

#![cfg_attr(not(test), no_std)]
#![deny(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ablation;
pub mod ann;
pub mod dataset;
mod error;
mod math;
pub mod metrics;
pub mod numerics;
pub mod regression;

pub use error::{Error, Result};
