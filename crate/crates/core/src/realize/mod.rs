//! Vessels from pole data: chains, triples, Mittag-Leffler assembly and
//! propagation of a base-point realization along t₂.

mod assemble;
mod laurent;
mod propagate;

pub use assemble::{
    companion_feedthrough, realize_mittag_leffler, realize_simple_poles, realize_single_pole, solve_feedthrough,
    PoleChain, PoleTriple, SimplePole, CHAIN_TOL, LINKAGE_TOL,
};
pub use laurent::{extract_pole_data, LaurentData, LAURENT_NODES, ORDER_THRESHOLD};
pub use propagate::{propagate_cb, PropagateMethod, PropagatedCB, CONTOUR_NODES};

#[cfg(test)]
mod tests;
