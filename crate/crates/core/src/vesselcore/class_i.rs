#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::signature::Signature;
use crate::error::Result;
use crate::numgrid::linalg::{self, c, CMat};

/// Max residual per defining property of class 𝓘.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassIReport {
    /// Cauchy–Riemann defect ‖∂S/∂λ̄‖ on |λ| = 2·radius.
    pub analyticity: f64,
    /// Midpoint defect against cubic interpolation of t₂ ↦ S(λ,t₂) on the grid.
    pub continuity: f64,
    /// ‖S(λ,t₂)Φ − Φ*S(λ,t₀)‖ at sampled λ and t₂.
    pub intertwining: f64,
    pub tol: f64,
}

impl ClassIReport {
    pub fn analytic(&self) -> bool {
        self.analyticity <= self.tol
    }

    pub fn continuous(&self) -> bool {
        self.continuity <= self.tol
    }

    pub fn intertwines(&self) -> bool {
        self.intertwining <= self.tol
    }

    pub fn pass(&self) -> bool {
        self.analytic() && self.continuous() && self.intertwines()
    }
}

const CIRCLE_POINTS: usize = 16;

pub fn class_i_check<F>(sampler: F, sig: &Signature, lambda_radius: f64, tol: f64) -> Result<ClassIReport>
where
    F: Fn(Complex64, f64) -> Result<CMat>,
{
    let grid = *sig.grid();
    let r = 2.0 * lambda_radius.max(1e-3);
    let circle = |k: usize, m: usize| Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.25) / m as f64);
    let times = [grid.t_start(), grid.node(grid.points() / 2), grid.t_end()];

    let mut analyticity: f64 = 0.0;
    for &t in &times {
        for k in 0..CIRCLE_POINTS {
            let lam = circle(k, CIRCLE_POINTS);
            let d = 1e-5 * lam.norm().max(1.0);
            let dx = (sampler(lam + c(d, 0.0), t)? - sampler(lam - c(d, 0.0), t)?) / c(2.0 * d, 0.0);
            let dy = (sampler(lam + c(0.0, d), t)? - sampler(lam - c(0.0, d), t)?) / c(2.0 * d, 0.0);
            let dbar = (dx + dy * c(0.0, 1.0)) * c(0.5, 0.0);
            analyticity = analyticity.max(linalg::norm(&dbar));
        }
    }

    let mut continuity: f64 = 0.0;
    let n = grid.points();
    for lam in [c(r, 0.0), c(0.0, r)] {
        let at_nodes = (0..n).map(|i| sampler(lam, grid.node(i))).collect::<Result<alloc::vec::Vec<_>>>()?;
        for i in 1..n - 2 {
            let mid = 0.5 * (grid.node(i) + grid.node(i + 1));
            let cubic = (&at_nodes[i] + &at_nodes[i + 1]) * c(9.0 / 16.0, 0.0)
                - (&at_nodes[i - 1] + &at_nodes[i + 2]) * c(1.0 / 16.0, 0.0);
            continuity = continuity.max(linalg::dist(&sampler(lam, mid)?, &cubic));
        }
    }

    let mut intertwining: f64 = 0.0;
    let input = sig.input_ode();
    let output = sig.output_ode();
    let t0 = grid.t_start();
    for k in 0..4 {
        let lam = circle(k, 4);
        let s0 = sampler(lam, t0)?;
        for &t in &times[1..] {
            let phi = input.propagate(lam, t0, t)?;
            let phis = output.propagate(lam, t0, t)?;
            let res = sampler(lam, t)? * phi - phis * &s0;
            intertwining = intertwining.max(linalg::norm(&res));
        }
    }
    Ok(ClassIReport { analyticity, continuity, intertwining, tol })
}
