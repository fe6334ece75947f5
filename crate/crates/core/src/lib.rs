//! Certification toolkit for Lieb–Thirring inequalities on the two-sphere and
//! the two-torus.
//!
//! The crate evaluates the spectral series whose strict bound by one drives
//! the improved constant `3π/32`, checks the analytic estimates around them,
//! and measures the inequalities themselves on explicit orthonormal families.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod empirical;
pub mod error;
pub mod figures;
pub mod grid;
pub mod harmonics;
pub mod profile;
pub mod record;
pub mod specfun;
pub mod sphere;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use record::VerificationRecord;

/// The improved Lieb–Thirring constant for scalar families on S² and T².
pub const LT_CONSTANT: f64 = 3.0 * std::f64::consts::PI / 32.0;

/// The semiclassical lower bound `1/(2π)`.
pub const SEMICLASSICAL_BOUND: f64 = 1.0 / (2.0 * std::f64::consts::PI);
