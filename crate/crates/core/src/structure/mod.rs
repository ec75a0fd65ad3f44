//! Controllability, observability, Kalman decomposition and transfer equivalence.

mod kalman;
mod moments;
mod similarity;
mod subspaces;

pub use kalman::{kalman_decompose, KalmanDecomp};
pub use moments::{equivalent, moments};
pub use similarity::{build_similarity, Similarity, SIMILARITY_TOL};
pub use subspaces::{
    controllable_subspace, global_controllable_subspace, global_unobservable_subspace, is_minimal,
    krylov_matrix, observability_matrix, unobservable_subspace, GLOBAL_RANK_REL,
};
