// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod cli;
pub mod dilation;
pub mod error;
pub mod evolution;
pub mod numerics;
pub mod pt_model;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
