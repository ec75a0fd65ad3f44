use alloc::vec::Vec;
use num_complex::Complex64;

use super::dopri::{integrate, integrate_nodes, Tolerances};
use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, TimeGrid, DEFAULT_COND_LIMIT};
use crate::vesselcore::Signature;

/// The family `P(t)y′ = (λQ(t) + R(t))y` shared by the input, output and adjoint ODEs.
#[derive(Debug, Clone)]
pub struct SpectralOde {
    pub lead: MatFn,
    pub spec: MatFn,
    pub shift: MatFn,
}

impl SpectralOde {
    pub fn new(lead: MatFn, spec: MatFn, shift: MatFn) -> Self {
        Self { lead, spec, shift }
    }

    pub fn dim(&self) -> usize {
        self.lead.rows()
    }

    pub fn grid(&self) -> &TimeGrid {
        self.lead.grid()
    }

    /// `P⁻¹(λQ + R)` at `t`.
    pub fn generator(&self, lambda: Complex64, t: f64) -> Result<CMat> {
        let rhs = self.spec.eval(t)? * lambda + self.shift.eval(t)?;
        let p = self.lead.eval(t)?;
        linalg::solve(&p, &rhs).ok_or(VesselError::Solver { t, reason: "leading coefficient is singular" })
    }

    fn check(&self) -> Result<()> {
        self.lead.check_invertible("leading coefficient", DEFAULT_COND_LIMIT)
    }

    /// Φ(λ, t, t0) at a single time, integrated directly.
    pub fn propagate(&self, lambda: Complex64, t0: f64, t: f64) -> Result<CMat> {
        self.grid().check(t0)?;
        self.grid().check(t)?;
        self.check()?;
        let id = linalg::eye(self.dim());
        if t == t0 {
            return Ok(id);
        }
        let mut ys = integrate(|s, y| Ok(self.generator(lambda, s)? * y), t0, &id, &[t], &Tolerances::default())?;
        Ok(ys.pop().expect("one output"))
    }

    /// Fundamental matrix sampled on the whole grid.
    pub fn fundamental(&self, lambda: Complex64, t0: f64) -> Result<FundMatrix> {
        self.grid().check(t0)?;
        self.check()?;
        let id = linalg::eye(self.dim());
        let nodes = self.grid().nodes();
        let ys = integrate_nodes(|s, y| Ok(self.generator(lambda, s)? * y), t0, &id, &nodes, &Tolerances::default())?;
        Ok(FundMatrix { lambda, base_time: t0, flow: MatFn::from_samples(*self.grid(), ys)? })
    }
}

/// Φ(λ, ·, t₀) sampled on a grid.
#[derive(Debug, Clone)]
pub struct FundMatrix {
    pub lambda: Complex64,
    pub base_time: f64,
    pub flow: MatFn,
}

impl FundMatrix {
    pub fn at(&self, t: f64) -> Result<CMat> {
        self.flow.eval(t)
    }

    /// Φ(λ, t, s) = Φ(λ, t, t₀)Φ(λ, s, t₀)⁻¹.
    pub fn between(&self, t: f64, s: f64) -> Result<CMat> {
        let fs = self.flow.eval(s)?;
        let ft = self.flow.eval(t)?;
        linalg::solve_right(&fs, &ft).ok_or(VesselError::Solver { t: s, reason: "fundamental matrix is singular" })
    }
}

/// F(t_to, t_from) for F′ = A₂F.
pub fn evolution_semigroup(a2: &MatFn, t_from: f64, t_to: f64) -> Result<CMat> {
    a2.grid().check(t_from)?;
    a2.grid().check(t_to)?;
    let id = linalg::eye(a2.rows());
    if t_from == t_to {
        return Ok(id);
    }
    let mut ys = integrate(|s, y| Ok(a2.eval(s)? * y), t_from, &id, &[t_to], &Tolerances::default())?;
    Ok(ys.pop().expect("one output"))
}

/// F(·, t0) sampled on the grid of `a2`.
pub fn evolution_flow(a2: &MatFn, t0: f64) -> Result<MatFn> {
    a2.grid().check(t0)?;
    let id = linalg::eye(a2.rows());
    if a2.samples().iter().all(|m| m.iter().all(|z| *z == linalg::ZERO)) {
        return Ok(MatFn::identity(*a2.grid(), a2.rows()));
    }
    let nodes = a2.grid().nodes();
    let ys: Vec<CMat> = integrate_nodes(|s, y| Ok(a2.eval(s)? * y), t0, &id, &nodes, &Tolerances::default())?;
    MatFn::from_samples(*a2.grid(), ys)
}

pub fn fundamental_input(sig: &Signature, lambda: Complex64, t0: f64) -> Result<FundMatrix> {
    sig.sigma1.check_invertible("sigma1", DEFAULT_COND_LIMIT)?;
    sig.input_ode().fundamental(lambda, t0)
}

pub fn fundamental_output(sig: &Signature, lambda: Complex64, t0: f64) -> Result<FundMatrix> {
    sig.sigma1s.check_invertible("sigma1s", DEFAULT_COND_LIMIT)?;
    sig.output_ode().fundamental(lambda, t0)
}

/// Ψ(μ, ·, t0) solving σ₁*ᴴu′ = (μσ₂*ᴴ − γ*ᴴ − (σ₁*ᴴ)′)u.
pub fn fundamental_adjoint_input(sig: &Signature, mu: Complex64, t0: f64) -> Result<FundMatrix> {
    sig.sigma1s.check_invertible("sigma1s", DEFAULT_COND_LIMIT)?;
    sig.adjoint().input_ode().fundamental(mu, t0)
}

/// Ψ*(μ, ·, t0) solving σ₁ᴴy′ = (μσ₂ᴴ − γᴴ − (σ₁ᴴ)′)y.
pub fn fundamental_adjoint_output(sig: &Signature, mu: Complex64, t0: f64) -> Result<FundMatrix> {
    sig.sigma1.check_invertible("sigma1", DEFAULT_COND_LIMIT)?;
    sig.adjoint().output_ode().fundamental(mu, t0)
}
