//! Security bounds and simulation for error-tolerant 1-2 randomised oblivious
//! string transfer in the noisy-storage model.
//!
//! The crate is split along the lines of what each part computes:
//!
//! - [`entropy`]: entropic quantities and asymptotic min-entropy rate bounds
//!   for a cheating receiver whose quantum memory is noisy and possibly bounded.
//! - [`rates`]: OT bit rates obtained by subtracting the error-correction
//!   leakage of the trusted noise, secure-region boundaries and finite string
//!   lengths.
//! - [`coding`]: small binary linear codes with syndrome decoding and Toeplitz
//!   2-universal hashing.
//! - [`protocol`]: seeded Monte-Carlo simulation of honest sessions.
//! - [`adversary`]: cheating-receiver strategies and their guessing statistics.

pub mod adversary;
pub mod bits;
pub mod coding;
pub mod entropy;
mod error;
pub mod optimize;
pub mod protocol;
pub mod rates;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
