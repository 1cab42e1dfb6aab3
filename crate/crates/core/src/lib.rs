//! Weighted differential entropies with central-moments weight functions.
//!
//! The crate is organised around a Gaussian core and three independent ways of
//! evaluating the same quantities:
//!
//! - [`wick`]: exact Gaussian moments by pair-partition (Isserlis) summation,
//! - [`numeric`]: tensor quadrature, Monte Carlo and exact finite-support checks,
//! - [`closed_form`]: the trivariate closed forms, each evaluable from the
//!   printed moment expressions (`FormulaMode::Paper`) or from exact moments
//!   (`FormulaMode::Wick`).
//!
//! [`wdic`] implements the weighted deviance information criterion, and
//! [`scan`] / [`verify`] drive the grid sweeps and the oracle comparisons used by
//! the command-line tool.
//!
//! All logarithms are natural (nats). Entropies use the standard sign
//! convention `H(f) = -∫ f log f`.

#![forbid(unsafe_code)]

pub mod closed_form;
mod error;
pub mod gaussian;
pub mod numeric;
pub mod scan;
pub mod verify;
pub mod wdic;
pub mod wick;

pub use error::{Error, Result};
pub use gaussian::{ConditionSpec, EntropyMode, GaussianDist};
pub use wick::{MomentSpec, ShiftSpec};
