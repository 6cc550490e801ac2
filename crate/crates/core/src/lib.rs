//! Spherical t-designs from equal-weight Jacobi quadratures and the recursive
//! product construction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
pub mod construct;
pub mod error;
pub mod exact_moments;
pub mod formats;
pub mod multi_index;
pub mod numeric;
pub mod orthopoly;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
