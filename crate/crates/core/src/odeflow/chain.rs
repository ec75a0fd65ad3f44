use alloc::vec::Vec;
use num_complex::Complex64;

use super::dopri::{integrate_nodes, Tolerances};
use super::fundamental::SpectralOde;
use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, DEFAULT_COND_LIMIT};
use crate::vesselcore::Signature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSide {
    /// Rows b_i of B̃, from the adjoint output equation at −z̄.
    Input,
    /// Columns c_i of C, from the output equation at z.
    Output,
}

/// Chain y₀, …, y_{L−1} with `zQy_i − Py_i′ + Ry_i = Qy_{i−1}` (y₋₁ = 0).
///
/// The output side uses (σ₁*, σ₂*, γ*) at `z`; the input side uses the adjoint
/// output data (σ₁ᴴ, σ₂ᴴ, −γᴴ − (σ₁ᴴ)′) at `−z̄`. All members are integrated
/// jointly as one block lower-bidiagonal system.
pub fn solve_companion_chain(
    sig: &Signature,
    z: Complex64,
    length: usize,
    side: ChainSide,
    t0: f64,
    seeds: &[CMat],
) -> Result<Vec<MatFn>> {
    if length == 0 || seeds.len() != length {
        return Err(VesselError::Precondition(alloc::format!(
            "chain needs length >= 1 and one seed per member (length {length}, {} seeds)",
            seeds.len()
        )));
    }
    let (ode, at) = match side {
        ChainSide::Output => {
            sig.sigma1s.check_invertible("sigma1s", DEFAULT_COND_LIMIT)?;
            (sig.output_ode(), z)
        }
        ChainSide::Input => {
            sig.sigma1.check_invertible("sigma1", DEFAULT_COND_LIMIT)?;
            (sig.adjoint().output_ode(), -z.conj())
        }
    };
    chain_for(&ode, at, length, t0, seeds)
}

pub(crate) fn chain_for(ode: &SpectralOde, z: Complex64, length: usize, t0: f64, seeds: &[CMat]) -> Result<Vec<MatFn>> {
    let d = ode.dim();
    for (i, s) in seeds.iter().enumerate() {
        if s.shape() != (d, 1) {
            return Err(VesselError::Shape {
                what: alloc::format!("seed {i}"),
                detail: alloc::format!("expected {d}x1, got {:?}", s.shape()),
            });
        }
    }
    ode.grid().check(t0)?;
    let mut y0 = linalg::zeros(d * length, 1);
    for (i, s) in seeds.iter().enumerate() {
        y0.view_mut((i * d, 0), (d, 1)).copy_from(s);
    }
    let rhs = |t: f64, y: &CMat| -> Result<CMat> {
        let p = ode.lead.eval(t)?;
        let q = ode.spec.eval(t)?;
        let r = ode.shift.eval(t)?;
        let diag = &q * z + r;
        let mut out = linalg::zeros(d * length, 1);
        for i in 0..length {
            let yi = y.view((i * d, 0), (d, 1));
            let mut v = &diag * yi;
            if i > 0 {
                v -= &q * y.view(((i - 1) * d, 0), (d, 1));
            }
            out.view_mut((i * d, 0), (d, 1)).copy_from(&v);
        }
        // P y′ = (zQ + R)y_i − Q y_{i−1}
        let mut sol = linalg::zeros(d * length, 1);
        for i in 0..length {
            let v = out.view((i * d, 0), (d, 1)).into_owned();
            let x = linalg::solve(&p, &v).ok_or(VesselError::Solver { t, reason: "leading coefficient is singular" })?;
            sol.view_mut((i * d, 0), (d, 1)).copy_from(&x);
        }
        Ok(sol)
    };
    let nodes = ode.grid().nodes();
    let ys = integrate_nodes(rhs, t0, &y0, &nodes, &Tolerances::default())?;
    (0..length)
        .map(|i| MatFn::from_samples(*ode.grid(), ys.iter().map(|y| y.view((i * d, 0), (d, 1)).into_owned()).collect()))
        .collect()
}

/// Max residual of the chain relations, using spline derivatives.
pub fn chain_residual(ode: &SpectralOde, z: Complex64, chain: &[MatFn]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, y) in chain.iter().enumerate() {
        let dy = y.derivative();
        for k in 0..y.grid().points() {
            let p = ode.lead.sample(k);
            let q = ode.spec.sample(k);
            let r = ode.shift.sample(k);
            let mut res = q * y.sample(k) * z - p * dy.sample(k) + r * y.sample(k);
            if i > 0 {
                res -= q * chain[i - 1].sample(k);
            }
            worst = worst.max(linalg::norm(&res));
        }
    }
    worst
}
