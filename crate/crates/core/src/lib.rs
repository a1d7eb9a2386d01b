//! Non-local point interactions in three dimensions: the fixed-center
//! operator, its spectrum and limits, critical couplings for the
//! many-body form, and the special functions underneath.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criticality;
pub mod error;
pub mod kernels;
pub mod limits;
pub mod manybody;
pub mod pointop;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};

/// A point in ℝ³.
pub type Vec3 = nalgebra::Vector3<f64>;
