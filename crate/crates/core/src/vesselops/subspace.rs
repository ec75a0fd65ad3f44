use alloc::format;
use alloc::string::String;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, TimeGrid, DEFAULT_COND_LIMIT};
use crate::odeflow::evolution_flow;
use crate::vesselcore::DiffVessel;

pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    Invariant,
    CoInvariant,
}

/// A family of subspaces of ℂⁿ given by orthonormal basis columns at every node.
#[derive(Debug, Clone)]
pub struct SubspaceFamily {
    basis: MatFn,
    kind: SubspaceKind,
}

impl SubspaceFamily {
    pub fn new(basis: MatFn, kind: SubspaceKind) -> Result<Self> {
        let k = basis.cols();
        for (node, q) in basis.samples().iter().enumerate() {
            let defect = linalg::dist(&(q.adjoint() * q), &linalg::eye(k));
            if defect > ORTHONORMAL_TOL {
                return Err(VesselError::Precondition(format!(
                    "subspace basis is not orthonormal at node {node} (defect {defect:e})"
                )));
            }
        }
        Ok(Self { basis, kind })
    }

    /// Constant span of the given columns, orthonormalized.
    pub fn constant(grid: TimeGrid, vectors: &CMat, kind: SubspaceKind) -> Result<Self> {
        let q = linalg::qr_positive(vectors);
        Self::new(MatFn::constant(grid, q), kind)
    }

    pub fn zero(grid: TimeGrid, n: usize, kind: SubspaceKind) -> Self {
        Self { basis: MatFn::zeros(grid, n, 0), kind }
    }

    pub fn basis(&self) -> &MatFn {
        &self.basis
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn with_kind(&self, kind: SubspaceKind) -> Self {
        Self { basis: self.basis.clone(), kind }
    }

    /// Node-wise orthogonal complement (basis not smooth in t₂; use projectors).
    pub(crate) fn complement_projector(&self, k: usize) -> CMat {
        let q = self.basis.sample(k);
        linalg::eye(q.nrows()) - q * q.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    pub kind: SubspaceKind,
    /// max ‖(I − P_G)A P_G‖ over nodes.
    pub operator: f64,
    /// max ‖(I − P_{G(t)})F(t,s)P_{G(s)}‖ over sampled pairs.
    pub flow: f64,
}

impl InvarianceReport {
    pub fn max(&self) -> f64 {
        self.operator.max(self.flow)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// (A₁×, A₂×) = (A₁ − B̃σ₁D⁻¹C, A₂ − B̃σ₂D⁻¹C).
pub fn cross_operators(v: &DiffVessel) -> Result<(MatFn, MatFn)> {
    let dinv = v.d.inverse_named("D", DEFAULT_COND_LIMIT)?;
    let tail = dinv.mul(&v.c);
    Ok((v.a1.sub(&v.b1().mul(&tail)), v.a2.sub(&v.b2().mul(&tail))))
}

const FLOW_SAMPLES: usize = 5;

pub fn check_invariant(v: &DiffVessel, g: &SubspaceFamily) -> Result<InvarianceReport> {
    if g.ambient_dim() != v.state_dim() || g.basis().grid() != v.grid() {
        return Err(VesselError::Shape {
            what: String::from("subspace"),
            detail: format!("ambient dimension {} vs state dimension {}", g.ambient_dim(), v.state_dim()),
        });
    }
    let (a1, a2) = match g.kind() {
        SubspaceKind::Invariant => (v.a1.clone(), v.a2.clone()),
        SubspaceKind::CoInvariant => cross_operators(v)?,
    };
    if g.dim() == 0 {
        return Ok(InvarianceReport { kind: g.kind(), operator: 0.0, flow: 0.0 });
    }
    let mut operator: f64 = 0.0;
    for k in 0..v.grid().points() {
        let q = g.basis().sample(k);
        let leak = g.complement_projector(k) * a1.sample(k) * q;
        operator = operator.max(linalg::norm(&leak));
    }
    let grid = *v.grid();
    let flow_fn = evolution_flow(&a2, grid.t_start())?;
    let times = grid.samples(FLOW_SAMPLES);
    let mut flow: f64 = 0.0;
    for &s in &times {
        let fs = flow_fn.eval(s)?;
        let qs = g.basis().eval(s)?;
        for &t in &times {
            if t == s {
                continue;
            }
            let fts = linalg::solve_right(&fs, &flow_fn.eval(t)?)
                .ok_or(VesselError::Solver { t, reason: "evolution is singular" })?;
            let qt = g.basis().eval(t)?;
            let pt = linalg::eye(qt.nrows()) - &qt * qt.adjoint();
            flow = flow.max(linalg::norm(&(pt * fts * &qs)));
        }
    }
    Ok(InvarianceReport { kind: g.kind(), operator, flow })
}
