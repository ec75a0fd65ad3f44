//! The vessel type, its axioms, and its transfer function.

mod class_i;
mod signature;
mod transfer;
mod verify;
mod vessel;

pub use class_i::{class_i_check, ClassIReport};
pub use signature::Signature;
pub use transfer::{check_intertwining, resolvent_state, transfer, transfer_ode_residual, SPECTRUM_GUARD};
pub use verify::{verify_vessel, ResidualReport, DEFAULT_TOL};
pub use vessel::DiffVessel;

#[cfg(test)]
mod tests;
