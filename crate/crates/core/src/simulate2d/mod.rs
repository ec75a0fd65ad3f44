//! Separated-variable trajectories of the 2D system and residual checks.
//!
//! The system is x_{t₁} = A₁x + B̃σ₁u, x_{t₂} = A₂x + B̃σ₂u, y = Du + Cx with
//! σ₂u_{t₁} − σ₁u_{t₂} + γu = 0 and σ₂*y_{t₁} − σ₁*y_{t₂} + γ*y = 0.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::TimeGrid;
use crate::odeflow::dopri::{integrate_nodes, Tolerances};
use crate::odeflow::evolution_semigroup;
use crate::vesselcore::{resolvent_state, transfer, DiffVessel};

/// Sampled (u, x, y) over a t₁ × t₂ grid; entry (i, j) sits at (t₁ᵢ, t₂ⱼ).
#[derive(Debug, Clone)]
pub struct TrajectoryBundle {
    pub t1_grid: TimeGrid,
    pub t2_grid: TimeGrid,
    pub u: Vec<CMat>,
    pub x: Vec<CMat>,
    pub y: Vec<CMat>,
    pub lambda: Option<Complex64>,
}

impl TrajectoryBundle {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.t2_grid.points() + j
    }

    pub fn len(&self) -> usize {
        self.t1_grid.points() * self.t2_grid.points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, v: &DiffVessel) -> Result<()> {
        let n = self.len();
        if self.u.len() != n || self.x.len() != n || self.y.len() != n {
            return Err(VesselError::Shape {
                what: alloc::string::String::from("trajectory bundle"),
                detail: format!("expected {n} samples per sheet"),
            });
        }
        let shapes = [(&self.u, v.input_dim(), "u"), (&self.x, v.state_dim(), "x"), (&self.y, v.output_dim(), "y")];
        for (sheet, dim, name) in shapes {
            if sheet.iter().any(|m| m.shape() != (dim, 1)) {
                return Err(VesselError::Shape {
                    what: alloc::string::String::from(name),
                    detail: format!("expected {dim}x1 samples"),
                });
            }
        }
        let g = v.grid();
        if self.t2_grid.t_start() < g.t_start() || self.t2_grid.t_end() > g.t_end() {
            return Err(VesselError::Grid(format!(
                "t2 range [{}, {}] leaves the vessel grid [{}, {}]",
                self.t2_grid.t_start(),
                self.t2_grid.t_end(),
                g.t_start(),
                g.t_end()
            )));
        }
        Ok(())
    }
}

/// u = u_λ(t₂)e^{λt₁} with u_λ from the input ODE and u_λ(t₂ start) = u0,
/// x_λ = (λ − A₁)⁻¹B̃σ₁u_λ and y_λ = S(λ, t₂)u_λ.
pub fn separated_trajectory(
    v: &DiffVessel,
    lambda: Complex64,
    u0: &CMat,
    t1_grid: TimeGrid,
    t2_grid: TimeGrid,
) -> Result<TrajectoryBundle> {
    if u0.shape() != (v.input_dim(), 1) {
        return Err(VesselError::Shape {
            what: alloc::string::String::from("u0"),
            detail: format!("expected {}x1, got {:?}", v.input_dim(), u0.shape()),
        });
    }
    let g = v.grid();
    if t2_grid.t_start() < g.t_start() || t2_grid.t_end() > g.t_end() {
        return Err(VesselError::Grid(alloc::string::String::from("t2 grid leaves the vessel grid")));
    }
    let ode = v.sig.input_ode();
    let nodes = t2_grid.nodes();
    let u_lambda = integrate_nodes(
        |t, u: &CMat| Ok(ode.generator(lambda, t)? * u),
        t2_grid.t_start(),
        u0,
        &nodes,
        &Tolerances::default(),
    )?;
    let mut xl = Vec::with_capacity(nodes.len());
    let mut yl = Vec::with_capacity(nodes.len());
    for (j, &t2) in nodes.iter().enumerate() {
        let r = resolvent_state(v, lambda, t2)?;
        xl.push(r * &u_lambda[j]);
        yl.push(transfer(v, lambda, t2)? * &u_lambda[j]);
    }
    let n1 = t1_grid.points();
    let mut u = Vec::with_capacity(n1 * nodes.len());
    let mut x = Vec::with_capacity(n1 * nodes.len());
    let mut y = Vec::with_capacity(n1 * nodes.len());
    for t1 in t1_grid.nodes() {
        let e = (lambda * t1).exp();
        for j in 0..nodes.len() {
            u.push(&u_lambda[j] * e);
            x.push(&xl[j] * e);
            y.push(&yl[j] * e);
        }
    }
    Ok(TrajectoryBundle { t1_grid, t2_grid, u, x, y, lambda: Some(lambda) })
}

/// Max-norm residuals of the 2D system over a bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeResiduals {
    /// x_{t₁} − A₁x − B̃σ₁u
    pub state_t1: f64,
    /// x_{t₂} − A₂x − B̃σ₂u
    pub state_t2: f64,
    /// y − Du − Cx
    pub output_map: f64,
    /// σ₂u_{t₁} − σ₁u_{t₂} + γu
    pub input_compat: f64,
    /// σ₂*y_{t₁} − σ₁*y_{t₂} + γ*y
    pub output_compat: f64,
}

impl PdeResiduals {
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("state_t1", self.state_t1),
            ("state_t2", self.state_t2),
            ("output_map", self.output_map),
            ("input_compat", self.input_compat),
            ("output_compat", self.output_compat),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|x| x.1).fold(0.0, f64::max)
    }
}

const MIN_NODES: usize = 5;

/// Fourth-order central difference of `f(k)` at index `k` with spacing `h`.
fn d4(f: impl Fn(usize) -> CMat, k: usize, h: f64) -> CMat {
    (f(k - 2) - f(k - 1) * linalg::c(8.0, 0.0) + f(k + 1) * linalg::c(8.0, 0.0) - f(k + 2)) / linalg::c(12.0 * h, 0.0)
}

pub fn pde_residuals(v: &DiffVessel, traj: &TrajectoryBundle) -> Result<PdeResiduals> {
    let (n1, n2) = (traj.t1_grid.points(), traj.t2_grid.points());
    if n1 < MIN_NODES || n2 < MIN_NODES {
        return Err(VesselError::Grid(format!(
            "finite differences need at least {MIN_NODES} nodes per axis, got {n1}x{n2}"
        )));
    }
    traj.check(v)?;
    let (h1, h2) = (traj.t1_grid.spacing(), traj.t2_grid.spacing());
    let at = |sheet: &Vec<CMat>, i: usize, j: usize| sheet[traj.index(i, j)].clone();
    let mut r = PdeResiduals { state_t1: 0.0, state_t2: 0.0, output_map: 0.0, input_compat: 0.0, output_compat: 0.0 };
    let s = &v.sig;
    for j in 0..n2 {
        let t2 = traj.t2_grid.node(j);
        let (a1, a2, bt, c, d) = (v.a1.eval(t2)?, v.a2.eval(t2)?, v.bt.eval(t2)?, v.c.eval(t2)?, v.d.eval(t2)?);
        let (s1, s2, g) = (s.sigma1.eval(t2)?, s.sigma2.eval(t2)?, s.gamma.eval(t2)?);
        let (s1s, s2s, gs) = (s.sigma1s.eval(t2)?, s.sigma2s.eval(t2)?, s.gammas.eval(t2)?);
        let inner2 = j >= 2 && j + 2 < n2;
        for i in 0..n1 {
            let (u, x, y) = (at(&traj.u, i, j), at(&traj.x, i, j), at(&traj.y, i, j));
            r.output_map = r.output_map.max(linalg::norm(&(&y - &d * &u - &c * &x)));
            let inner1 = i >= 2 && i + 2 < n1;
            if inner1 {
                let xt1 = d4(|k| at(&traj.x, k, j), i, h1);
                r.state_t1 = r.state_t1.max(linalg::norm(&(xt1 - &a1 * &x - &bt * &s1 * &u)));
            }
            if inner2 {
                let xt2 = d4(|k| at(&traj.x, i, k), j, h2);
                r.state_t2 = r.state_t2.max(linalg::norm(&(xt2 - &a2 * &x - &bt * &s2 * &u)));
            }
            if inner1 && inner2 {
                let ut1 = d4(|k| at(&traj.u, k, j), i, h1);
                let ut2 = d4(|k| at(&traj.u, i, k), j, h2);
                r.input_compat = r.input_compat.max(linalg::norm(&(&s2 * ut1 - &s1 * ut2 + &g * &u)));
                let yt1 = d4(|k| at(&traj.y, k, j), i, h1);
                let yt2 = d4(|k| at(&traj.y, i, k), j, h2);
                r.output_compat = r.output_compat.max(linalg::norm(&(&s2s * yt1 - &s1s * yt2 + &gs * &y)));
            }
        }
    }
    Ok(r)
}

/// ‖e^{A₁(t₂)Δ₁}F(t₂,t₂⁰)x₀ − F(t₂,t₂⁰)e^{A₁(t₂⁰)Δ₁}x₀‖ with Δ₁ = t₁ − t₁⁰:
/// the two routes from `origin` to `corner` under free evolution.
pub fn two_path_consistency(v: &DiffVessel, x0: &CMat, origin: (f64, f64), corner: (f64, f64)) -> Result<f64> {
    if x0.shape() != (v.state_dim(), 1) {
        return Err(VesselError::Shape {
            what: alloc::string::String::from("x0"),
            detail: format!("expected {}x1, got {:?}", v.state_dim(), x0.shape()),
        });
    }
    let dt1 = linalg::c(corner.0 - origin.0, 0.0);
    if corner.0 == origin.0 {
        return Ok(0.0);
    }
    let f = evolution_semigroup(&v.a2, origin.1, corner.1)?;
    let up_then_right = linalg::expm(&(v.a1.eval(corner.1)? * dt1)) * &f * x0;
    let right_then_up = &f * linalg::expm(&(v.a1.eval(origin.1)? * dt1)) * x0;
    Ok(linalg::dist(&up_then_right, &right_then_up))
}
