//! Vessel algebra: cascade, inverse, adjoint, gauge, projection and compression.

mod algebra;
mod factor;
mod subspace;

pub use algebra::{adjoint, adjoint_relation_check, cascade, gauge_transform, invert, COMPAT_TOL};
pub(crate) use algebra::same_signature;
pub use factor::{compress, decompose, project, project_with, FeedthroughSplit};
pub use subspace::{
    check_invariant, cross_operators, InvarianceReport, SubspaceFamily, SubspaceKind, INVARIANCE_TOL,
    ORTHONORMAL_TOL,
};
