//! Channel models for electromagnetic-information-theoretic MIMO.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no I/O. It covers:
//!
//! - [`green`] and [`emchannel`]: free-space scalar/dyadic Green's functions,
//!   near/far-field decomposition, and the port-to-port EM channel built from
//!   precoding/combining current distributions.
//! - [`wavenumber`]: the densely spaced (holographic) array channel generated
//!   in the wavenumber domain from von Mises-Fisher angular spectra.
//! - [`nearfield`]: spherical-wavefront extension of the cluster channel with
//!   per-element visibility.
//! - [`tripol`]: joint uplink/downlink estimation for tri-polarized ports.
//! - [`capacity`]: log-det capacity, water-filling, and ensembles.
//!
//! File formats, scenarios and the command line live in the `eit-sim` crate.
#![no_std]
#![deny(unsafe_code)]
// guards are written as !(x > 0.0) so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod capacity;
pub mod cdl;
pub mod emchannel;
pub mod error;
pub mod green;
pub mod linalg;
pub mod nearfield;
pub mod pattern;
pub mod quadrature;
pub mod rng;
pub mod tripol;
pub mod wave;
pub mod wavenumber;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use wave::{Position3, WaveContext};
