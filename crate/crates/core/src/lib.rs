//! Sparse recovery of atomic measures in reproducing kernel Hilbert spaces.
//!
//! Signals are finite kernel combinations `f = Σ c_i K_{x_i}` in one of three
//! unit-norm kernel spaces (trigonometric polynomials on the torus, the
//! Paley-Wiener space on the line, the normalized Bargmann space on the
//! plane). The crate measures them through Bessel families, recovers the
//! atomic measure by total-variation minimization, and builds the dual
//! certificates and concentration bounds that certify recovery.
//!
//! The crate is `no_std` (with `alloc`); IO and the command line live in the
//! `atomkernel` companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod certificate;
pub mod domain;
mod error;
pub mod linalg;
pub mod math;
pub mod measure;
pub mod measurements;
pub mod rkhs;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};

/// Crate version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex double used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
