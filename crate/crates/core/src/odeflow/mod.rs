//! Linear ODEs of the theory: the evolution semigroup F generated by A₂, the
//! input/output fundamental matrices with spectral parameter, their adjoints,
//! and companion chains.

mod chain;
pub mod dopri;
mod fundamental;

pub use chain::{chain_residual, solve_companion_chain, ChainSide};
pub use dopri::Tolerances;
pub use fundamental::{
    evolution_flow, evolution_semigroup, fundamental_adjoint_input, fundamental_adjoint_output, fundamental_input,
    fundamental_output, FundMatrix, SpectralOde,
};

#[cfg(test)]
pub(crate) mod tests;
