#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod chebyshev;
pub mod cli;
pub mod config;
pub mod error;
pub mod functional;
pub mod grid;
pub mod mountain_pass;
pub mod quadrature;
pub mod riesz;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
