//! Feature-engineering toolkit for grayscale video volumes.
//!
//! The crate covers the full path from raw frame directories to a
//! leave-one-subject-out recognition rate:
//!
//! - [`volume`] — video volumes, dataset manifests, synthetic motion clips
//! - [`evm`] — Eulerian motion magnification (Laplacian pyramid + temporal bandpass)
//! - [`tim`] — temporal frame-count normalization
//! - [`lbp`] — LBP, LBP-TOP and LBP-SIP spatiotemporal descriptors
//! - [`hsdg`] — single-direction gradient histograms over 18 fixed directions
//! - [`features`] — block partitioning and descriptor concatenation
//! - [`classify`] — SVM (linear / chi-square) under LOSO cross-validation

pub mod classify;
pub mod error;
pub mod evm;
pub mod features;
pub mod hsdg;
pub mod lbp;
pub mod tim;
pub mod volume;

#[cfg(any(test, feature = "test-oracles"))]
pub mod oracles;

pub use error::{Error, Result};
