//! Speech enhancement by impulsiveness-index selection of ensemble EMD modes.
//!
//! The noisy input is decomposed into intrinsic mode functions with ensemble
//! EMD, the characteristic exponent α of every mode is estimated frame by frame
//! with McCulloch's quantile estimator, noise-like (high α) modes are dropped
//! against an adaptive threshold, and the kept modes are windowed and
//! overlap-added back together. Objective metrics (LLR, fwSNRseg, STOI) are
//! included for evaluation.

pub mod emd;
pub mod enhance;
pub mod error;
pub mod metrics;
mod rng;
pub mod signal;
pub mod stable;
pub mod synth;

pub use error::{Error, Result};
pub use signal::Signal;
