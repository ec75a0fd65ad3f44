use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, DEFAULT_COND_LIMIT};
use crate::odeflow::dopri::{integrate_nodes, Tolerances};
use crate::vesselcore::Signature;

pub const CONTOUR_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagateMethod {
    Ode,
    /// Circle of radius 1.5‖A₁‖_F + 1 with [`CONTOUR_NODES`] nodes.
    Contour,
    ContourWith { radius: f64, nodes: usize },
}

/// C(t₂) and B̃(t₂) carried from the base point, with the trapezoid error
/// estimate (node doubling) for contour runs and 0 for the ODE route.
#[derive(Debug, Clone)]
pub struct PropagatedCB {
    pub c: MatFn,
    pub bt: MatFn,
    pub error_estimate: f64,
}

fn check_shapes(c0: &CMat, b0: &CMat, a1: &CMat, sig: &Signature) -> Result<()> {
    let n = a1.nrows();
    if a1.ncols() != n || c0.shape() != (sig.output_dim(), n) || b0.shape() != (n, sig.input_dim()) {
        return Err(VesselError::Shape {
            what: alloc::string::String::from("base realization"),
            detail: alloc::format!("C0 {:?}, A1 {:?}, B0 {:?}", c0.shape(), a1.shape(), b0.shape()),
        });
    }
    Ok(())
}

/// Solves σ₁*C′ = σ₂*CA₁ + γ*C and (B̃σ₁)′ = −A₁B̃σ₂ − B̃γ from (C₀, B₀) at `t0`.
pub fn propagate_cb(
    c0: &CMat,
    b0: &CMat,
    a1: &CMat,
    sig: &Signature,
    t0: f64,
    method: PropagateMethod,
) -> Result<PropagatedCB> {
    check_shapes(c0, b0, a1, sig)?;
    sig.check_invertible(DEFAULT_COND_LIMIT)?;
    sig.grid().check(t0)?;
    match method {
        PropagateMethod::Ode => by_ode(c0, b0, a1, sig, t0),
        PropagateMethod::Contour => by_contour(c0, b0, a1, sig, t0, 1.5 * linalg::norm(a1) + 1.0, CONTOUR_NODES),
        PropagateMethod::ContourWith { radius, nodes } => by_contour(c0, b0, a1, sig, t0, radius, nodes),
    }
}

fn by_ode(c0: &CMat, b0: &CMat, a1: &CMat, sig: &Signature, t0: f64) -> Result<PropagatedCB> {
    let grid = *sig.grid();
    let nodes = grid.nodes();
    let tol = Tolerances::default();
    let cs = integrate_nodes(
        |t, c: &CMat| {
            let v = sig.sigma2s.eval(t)? * c * a1 + sig.gammas.eval(t)? * c;
            linalg::solve(&sig.sigma1s.eval(t)?, &v).ok_or(VesselError::Solver { t, reason: "sigma1s is singular" })
        },
        t0,
        c0,
        &nodes,
        &tol,
    )?;
    // G = B̃σ₁ obeys G′ = −A₁Gσ₁⁻¹σ₂ − Gσ₁⁻¹γ
    let g0 = b0 * sig.sigma1.eval(t0)?;
    let gs = integrate_nodes(
        |t, g: &CMat| {
            let s1 = sig.sigma1.eval(t)?;
            let rhs = a1 * g * linalg::solve(&s1, &sig.sigma2.eval(t)?).ok_or(VesselError::Solver {
                t,
                reason: "sigma1 is singular",
            })? + g * linalg::solve(&s1, &sig.gamma.eval(t)?).ok_or(VesselError::Solver { t, reason: "sigma1 is singular" })?;
            Ok(-rhs)
        },
        t0,
        &g0,
        &nodes,
        &tol,
    )?;
    let c = MatFn::from_samples(grid, cs)?;
    let g = MatFn::from_samples(grid, gs)?;
    let bt = g.mul(&sig.sigma1.inverse_named("sigma1", DEFAULT_COND_LIMIT)?);
    Ok(PropagatedCB { c, bt, error_estimate: 0.0 })
}

/// C(t) = (1/2πi)∮Φ*(λ,t,t₀)C₀(λ−A₁)⁻¹dλ and
/// B̃σ₁(t) = (1/2πi)∮(λ−A₁)⁻¹B₀σ₁(t₀)Φ(λ,t,t₀)⁻¹dλ,
/// with Φ*, Φ the output and input fundamental matrices.
fn by_contour(c0: &CMat, b0: &CMat, a1: &CMat, sig: &Signature, t0: f64, radius: f64, nodes: usize) -> Result<PropagatedCB> {
    let n = a1.nrows();
    let spec_radius = linalg::eigenvalues(a1).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let distance = radius - spec_radius;
    if nodes < 8 || !nodes.is_multiple_of(2) || !(distance > 1e-3 * (1.0 + radius)) {
        return Err(VesselError::Contour { radius, distance });
    }
    let grid = *sig.grid();
    let g0 = b0 * sig.sigma1.eval(t0)?;
    let in_ode = sig.input_ode();
    let out_ode = sig.output_ode();
    let np = grid.points();
    // sums over all nodes and over even nodes only (the halved rule)
    let mut c_full = alloc::vec![linalg::zeros(c0.nrows(), n); np];
    let mut c_half = c_full.clone();
    let mut g_full = alloc::vec![linalg::zeros(n, g0.ncols()); np];
    let mut g_half = g_full.clone();
    for j in 0..nodes {
        let w = Complex64::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64);
        // dλ/(2πi) = w dθ/(2π) → weight w/N
        let weight = w / nodes as f64;
        let res = linalg::inverse(&(linalg::eye(n) * w - a1))
            .ok_or(VesselError::Contour { radius, distance })?;
        let phi_out = out_ode.fundamental(w, t0)?;
        let phi_in = in_ode.fundamental(w, t0)?;
        let left = c0 * &res * weight;
        let right = &res * &g0 * weight;
        for k in 0..np {
            let ck = phi_out.flow.sample(k) * &left;
            let pinv = linalg::inverse(phi_in.flow.sample(k))
                .ok_or(VesselError::Solver { t: grid.node(k), reason: "input fundamental matrix is singular" })?;
            let gk = &right * pinv;
            if j % 2 == 0 {
                c_half[k] += &ck * Complex64::new(2.0, 0.0);
                g_half[k] += &gk * Complex64::new(2.0, 0.0);
            }
            c_full[k] += ck;
            g_full[k] += gk;
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..np {
        err = err.max(linalg::dist(&c_full[k], &c_half[k])).max(linalg::dist(&g_full[k], &g_half[k]));
    }
    let c = MatFn::from_samples(grid, c_full)?;
    let g = MatFn::from_samples(grid, g_full)?;
    let bt = g.mul(&sig.sigma1.inverse_named("sigma1", DEFAULT_COND_LIMIT)?);
    Ok(PropagatedCB { c, bt, error_estimate: err })
}
