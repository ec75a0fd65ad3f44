use alloc::vec::Vec;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::MatFn;
use crate::odeflow::evolution_flow;
use crate::vesselcore::DiffVessel;

/// Relative singular-value cutoff for spans assembled from integrated flows.
/// The flow carries integration error near 1e-10, far above the local cutoff.
pub const GLOBAL_RANK_REL: f64 = 1e-8;

fn krylov(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let m = b.ncols();
    let mut k = linalg::zeros(n, n * m);
    let mut block = b.clone();
    for j in 0..n {
        k.view_mut((0, j * m), (n, m)).copy_from(&block);
        block = a * block;
    }
    k
}

fn observability(a: &CMat, c: &CMat) -> CMat {
    let n = a.nrows();
    let p = c.nrows();
    let mut o = linalg::zeros(n * p, n);
    let mut block = c.clone();
    for j in 0..n {
        o.view_mut((j * p, 0), (p, n)).copy_from(&block);
        block *= a;
    }
    o
}

/// [B̃, A₁B̃, …, A₁ⁿ⁻¹B̃] at t₂.
pub fn krylov_matrix(v: &DiffVessel, t2: f64) -> Result<CMat> {
    Ok(krylov(&v.a1.eval(t2)?, &v.bt.eval(t2)?))
}

/// [C; CA₁; …; CA₁ⁿ⁻¹] at t₂.
pub fn observability_matrix(v: &DiffVessel, t2: f64) -> Result<CMat> {
    Ok(observability(&v.a1.eval(t2)?, &v.c.eval(t2)?))
}

/// Orthonormal basis of 𝒞_{t₂} = span{A₁ʲB̃}.
pub fn controllable_subspace(v: &DiffVessel, t2: f64) -> Result<CMat> {
    if v.state_dim() == 0 {
        return Ok(linalg::zeros(0, 0));
    }
    Ok(linalg::orth(&krylov_matrix(v, t2)?))
}

/// Orthonormal basis of 𝒪⊥_{t₂} = ∩ ker CA₁ʲ.
pub fn unobservable_subspace(v: &DiffVessel, t2: f64) -> Result<CMat> {
    if v.state_dim() == 0 {
        return Ok(linalg::zeros(0, 0));
    }
    Ok(linalg::null_space(&observability_matrix(v, t2)?))
}

/// F(t, s) = Φ(t)Φ(s)⁻¹ from a flow Φ sampled on the grid.
pub(crate) struct Transport {
    flow: MatFn,
}

impl Transport {
    pub(crate) fn new(v: &DiffVessel) -> Result<Self> {
        Ok(Self { flow: evolution_flow(&v.a2, v.grid().t_start())? })
    }

    pub(crate) fn between(&self, t: f64, s: f64) -> Result<CMat> {
        linalg::solve_right(&self.flow.eval(s)?, &self.flow.eval(t)?)
            .ok_or(VesselError::Solver { t: s, reason: "evolution is singular" })
    }

    pub(crate) fn at_node(&self, k: usize, s: f64) -> Result<CMat> {
        let fs = self.flow.eval(s)?;
        linalg::solve_right(&fs, self.flow.sample(k))
            .ok_or(VesselError::Solver { t: s, reason: "evolution is singular" })
    }
}

fn check_samples(s_samples: usize) -> Result<()> {
    if s_samples < 2 {
        return Err(VesselError::Precondition(alloc::format!(
            "global subspaces need at least 2 time samples, got {s_samples}"
        )));
    }
    Ok(())
}

/// span over sampled s of F(t₂, s)·𝒞_s.
pub fn global_controllable_subspace(v: &DiffVessel, t2: f64, s_samples: usize) -> Result<CMat> {
    check_samples(s_samples)?;
    v.grid().check(t2)?;
    let n = v.state_dim();
    if n == 0 {
        return Ok(linalg::zeros(0, 0));
    }
    let tr = Transport::new(v)?;
    let mut cols: Vec<CMat> = Vec::new();
    for s in v.grid().samples(s_samples) {
        cols.push(tr.between(t2, s)? * krylov_matrix(v, s)?);
    }
    let width: usize = cols.iter().map(|m| m.ncols()).sum();
    let mut all = linalg::zeros(n, width);
    let mut c0 = 0;
    for m in &cols {
        all.view_mut((0, c0), m.shape()).copy_from(m);
        c0 += m.ncols();
    }
    Ok(linalg::orth_rel(&all, GLOBAL_RANK_REL))
}

/// ∩ over sampled s of F(s, t₂)⁻¹·𝒪⊥_s.
pub fn global_unobservable_subspace(v: &DiffVessel, t2: f64, s_samples: usize) -> Result<CMat> {
    check_samples(s_samples)?;
    v.grid().check(t2)?;
    let n = v.state_dim();
    if n == 0 {
        return Ok(linalg::zeros(0, 0));
    }
    let tr = Transport::new(v)?;
    let mut rows: Vec<CMat> = Vec::new();
    for s in v.grid().samples(s_samples) {
        rows.push(observability_matrix(v, s)? * tr.between(s, t2)?);
    }
    let height: usize = rows.iter().map(|m| m.nrows()).sum();
    let mut all = linalg::zeros(height, n);
    let mut r0 = 0;
    for m in &rows {
        all.view_mut((r0, 0), m.shape()).copy_from(m);
        r0 += m.nrows();
    }
    Ok(linalg::null_space_rel(&all, GLOBAL_RANK_REL))
}

/// 𝒞 full and 𝒪⊥ trivial at t₂.
pub fn is_minimal(v: &DiffVessel, t2: f64) -> Result<bool> {
    Ok(controllable_subspace(v, t2)?.ncols() == v.state_dim() && unobservable_subspace(v, t2)?.ncols() == 0)
}
