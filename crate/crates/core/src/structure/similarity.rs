use alloc::format;
use alloc::vec::Vec;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg;
use crate::numgrid::MatFn;
use crate::vesselcore::DiffVessel;

use super::subspaces::{is_minimal, krylov_matrix};

/// Relative intertwining residual above which no similarity is reported.
pub const SIMILARITY_TOL: f64 = 1e-6;

/// T(t₂) with Ǎ₁T = TA₁, Ǎ₂T = TA₂ + T′, B̌ = TB̃, Č T = C, plus the
/// relative residuals of those four identities over the grid.
#[derive(Debug, Clone)]
pub struct Similarity {
    pub map: MatFn,
    pub residuals: [f64; 4],
}

impl Similarity {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

/// Maps the Krylov generators of `v1` onto those of `v2` node by node:
/// T = K₂K₁⁺. Both vessels must be minimal at `t2`.
pub fn build_similarity(v1: &DiffVessel, v2: &DiffVessel, t2: f64) -> Result<Similarity> {
    for (name, v) in [("first", v1), ("second", v2)] {
        if !is_minimal(v, t2)? {
            return Err(VesselError::Precondition(format!("{name} vessel is not minimal at t2 = {t2}")));
        }
    }
    if v1.grid() != v2.grid() {
        return Err(VesselError::Precondition(alloc::string::String::from("vessels live on different grids")));
    }
    if v1.state_dim() != v2.state_dim() || v1.input_dim() != v2.input_dim() || v1.output_dim() != v2.output_dim() {
        return Err(VesselError::NoSimilarity { residual: f64::INFINITY });
    }
    let grid = *v1.grid();
    let mut samples = Vec::with_capacity(grid.points());
    for t in grid.nodes() {
        let k1 = krylov_matrix(v1, t)?;
        let k2 = krylov_matrix(v2, t)?;
        samples.push(k2 * linalg::pinv(&k1));
    }
    let map = MatFn::from_samples(grid, samples)?;
    let tp = map.derivative();
    let mut r = [0.0f64; 4];
    for k in 0..grid.points() {
        let t = map.sample(k);
        let (a1, a2, b, c) = (v1.a1.sample(k), v1.a2.sample(k), v1.bt.sample(k), v1.c.sample(k));
        let (h1, h2, hb, hc) = (v2.a1.sample(k), v2.a2.sample(k), v2.bt.sample(k), v2.c.sample(k));
        let scale = linalg::norm(t) * (linalg::norm(a1) + linalg::norm(h1));
        r[0] = r[0].max(rel(linalg::dist(&(h1 * t), &(t * a1)), scale));
        let scale = linalg::norm(t) * (linalg::norm(a2) + linalg::norm(h2)) + linalg::norm(tp.sample(k));
        r[1] = r[1].max(rel(linalg::dist(&(h2 * t), &(t * a2 + tp.sample(k))), scale));
        r[2] = r[2].max(rel(linalg::dist(hb, &(t * b)), linalg::norm(hb)));
        r[3] = r[3].max(rel(linalg::dist(&(hc * t), c), linalg::norm(c)));
    }
    let out = Similarity { map, residuals: r };
    if out.max_residual() > SIMILARITY_TOL {
        return Err(VesselError::NoSimilarity { residual: out.max_residual() });
    }
    Ok(out)
}
