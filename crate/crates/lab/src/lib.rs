//! File formats and command-line front end for `vessel-core`.

// `!(x <= tol)` is used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod formats;

pub use error::{LabError, LabResult};
