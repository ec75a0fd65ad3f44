use alloc::vec::Vec;

use super::vessel::DiffVessel;
use crate::numgrid::linalg::norm;

pub const DEFAULT_TOL: f64 = 1e-6;

/// Node-wise residuals of the four canonical axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub lax: f64,
    pub input_cond: f64,
    pub output_cond: f64,
    pub linkage1: f64,
    pub linkage2: f64,
    pub linkage3: f64,
    pub max_over_grid: f64,
    /// `[lax, input, output, linkage1, linkage2, linkage3]` per node.
    pub per_node: Vec<[f64; 6]>,
    pub tol: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("lax", self.lax),
            ("input_cond", self.input_cond),
            ("output_cond", self.output_cond),
            ("linkage1", self.linkage1),
            ("linkage2", self.linkage2),
            ("linkage3", self.linkage3),
        ]
    }

    /// Node with the largest residual.
    pub fn worst_node(&self) -> usize {
        self.per_node
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.iter().copied().fold(0.0, f64::max)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc })
            .0
    }
}

/// Residuals of
/// (i) A₁′ = A₂A₁ − A₁A₂,
/// (ii) (B̃σ₁)′ = A₂B̃σ₁ − A₁B̃σ₂ − B̃γ,
/// (iii) σ₁*C′ = σ₂*CA₁ − σ₁*CA₂ + γ*C,
/// (iv) σ₁*D = D̃σ₁, σ₂*D = D̃σ₂, D̃γ = σ₂*CB̃σ₁ − σ₁*CB̃σ₂ − σ₁*D′ + γ*D,
/// with derivatives taken from the spline interpolants.
pub fn verify_vessel(v: &DiffVessel, tol: f64) -> ResidualReport {
    let da1 = v.a1.derivative();
    let b1 = v.b1();
    let db1 = b1.derivative();
    let dc = v.c.derivative();
    let dd = v.d.derivative();
    let s = &v.sig;
    let mut per_node = Vec::with_capacity(v.grid().points());
    for k in 0..v.grid().points() {
        let a1 = v.a1.sample(k);
        let a2 = v.a2.sample(k);
        let bt = v.bt.sample(k);
        let c = v.c.sample(k);
        let d = v.d.sample(k);
        let dt = v.dt.sample(k);
        let (s1, s2, g) = (s.sigma1.sample(k), s.sigma2.sample(k), s.gamma.sample(k));
        let (s1s, s2s, gs) = (s.sigma1s.sample(k), s.sigma2s.sample(k), s.gammas.sample(k));
        let lax = da1.sample(k) - (a2 * a1 - a1 * a2);
        let input = db1.sample(k) - a2 * b1.sample(k) + a1 * bt * s2 + bt * g;
        let output = s1s * dc.sample(k) + s1s * c * a2 - s2s * c * a1 - gs * c;
        let l1 = s1s * d - dt * s1;
        let l2 = s2s * d - dt * s2;
        let cb = c * bt;
        let l3 = dt * g - (s2s * &cb * s1 - s1s * &cb * s2 - s1s * dd.sample(k) + gs * d);
        per_node.push([norm(&lax), norm(&input), norm(&output), norm(&l1), norm(&l2), norm(&l3)]);
    }
    let col = |j: usize| per_node.iter().map(|r| r[j]).fold(0.0, f64::max);
    let (lax, input_cond, output_cond) = (col(0), col(1), col(2));
    let (linkage1, linkage2, linkage3) = (col(3), col(4), col(5));
    let max_over_grid = [lax, input_cond, output_cond, linkage1, linkage2, linkage3]
        .into_iter()
        .fold(0.0, f64::max);
    ResidualReport {
        lax,
        input_cond,
        output_cond,
        linkage1,
        linkage2,
        linkage3,
        max_over_grid,
        per_node,
        tol,
        pass: max_over_grid <= tol,
    }
}
