//! Numerical toolkit for Bekollé–Bonami weights on the unit disc and their
//! relation to Bloch functions.

// `!(x < y)` is used on purpose so that NaN lands on the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod carleson;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod numerics;
pub mod operators;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{DiskPoint, MetricConvention};
