// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod coords;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod projection;
pub mod quadrature;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
