//! Scalar reference vessels on `[0, 1]` with 129 nodes.

#[allow(unused_imports)]
use num_traits::Float;
use crate::numgrid::linalg::{c, from_real_rows, scalar};
use crate::numgrid::{MatFn, TimeGrid};
use crate::vesselcore::{DiffVessel, Signature};

fn k(grid: TimeGrid, x: f64) -> MatFn {
    MatFn::constant(grid, scalar(c(x, 0.0)))
}

fn expo(grid: TimeGrid, a: f64) -> MatFn {
    MatFn::from_fn(grid, |t| scalar(c((a * t).exp(), 0.0))).expect("finite samples")
}

/// σ₁ = σ₁* = 1, σ₂ = σ₂* = γ = γ* = 0.
pub fn v0_signature(grid: TimeGrid) -> Signature {
    Signature::symmetric(k(grid, 1.0), k(grid, 0.0), k(grid, 0.0)).expect("scalar signature")
}

/// σ₁ = σ₂ = σ₁* = σ₂* = 1, γ = 0, γ* = g.
pub fn vg_signature(grid: TimeGrid, g: f64) -> Signature {
    Signature::new(k(grid, 1.0), k(grid, 1.0), k(grid, 0.0), k(grid, 1.0), k(grid, 1.0), k(grid, g))
        .expect("scalar signature")
}

/// S = 1 + 1/λ with trivial signature.
pub fn v0() -> DiffVessel {
    let g = TimeGrid::unit();
    DiffVessel::new(k(g, 0.0), k(g, 0.0), k(g, 1.0), k(g, 1.0), k(g, 1.0), k(g, 1.0), v0_signature(g))
        .expect("fixture shapes")
}

/// S = 1 + 1/(λ − a): A₁ = a, B̃ = e^{−at}, C = e^{at}.
pub fn va(a: f64) -> DiffVessel {
    let g = TimeGrid::unit();
    DiffVessel::new(k(g, a), k(g, 0.0), expo(g, -a), expo(g, a), k(g, 1.0), k(g, 1.0), vg_signature(g, 0.0))
        .expect("fixture shapes")
}

/// S = e^{gt}(1 + 1/λ): A₁ = 0, B̃ = 1, C = D = D̃ = e^{gt}.
pub fn vg(gain: f64) -> DiffVessel {
    let g = TimeGrid::unit();
    DiffVessel::new(
        k(g, 0.0),
        k(g, 0.0),
        k(g, 1.0),
        expo(g, gain),
        expo(g, gain),
        expo(g, gain),
        vg_signature(g, gain),
    )
    .expect("fixture shapes")
}

/// The cascade of V0 with itself: S = (1 + 1/λ)².
pub fn vc2() -> DiffVessel {
    let g = TimeGrid::unit();
    let m = |r, cols, e: &[f64]| MatFn::constant(g, from_real_rows(r, cols, e));
    DiffVessel::new(
        m(2, 2, &[0.0, 0.0, 1.0, 0.0]),
        m(2, 2, &[0.0; 4]),
        m(2, 1, &[1.0, 1.0]),
        m(1, 2, &[1.0, 1.0]),
        k(g, 1.0),
        k(g, 1.0),
        v0_signature(g),
    )
    .expect("fixture shapes")
}

/// The four reference vessels with their names.
pub fn all() -> [(&'static str, DiffVessel); 4] {
    [("V0", v0()), ("VA(1)", va(1.0)), ("VG(1)", vg(1.0)), ("VC2", vc2())]
}
