//! Complex matrices and sampled matrix functions of t₂.

mod grid;
pub mod linalg;
mod matfn;

pub use grid::TimeGrid;
pub use linalg::CMat;
pub use matfn::{MatFn, DEFAULT_COND_LIMIT};
