#![no_std]
// `!(x <= tol)` is used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Differential vessels: overdetermined 2D linear systems invariant in t₁,
//! their transfer functions S(λ, t₂), and the algebra built on them.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fixtures;
pub mod numgrid;
pub mod odeflow;
pub mod population;
pub mod realize;
pub mod simulate2d;
pub mod structure;
pub mod vesselcore;
pub mod vesselops;

pub use error::{Result, VesselError};
pub use num_complex::Complex64;
