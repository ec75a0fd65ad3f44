use num_complex::Complex64;

use super::vessel::DiffVessel;
use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, c, CMat};

/// Distance threshold factor for the resolvent.
pub const SPECTRUM_GUARD: f64 = 1e-10;

/// Solves (λI − A₁)X = rhs at `t2`, refusing λ in the numerical spectrum.
pub(crate) fn resolvent_solve(a1: &CMat, lambda: Complex64, rhs: &CMat) -> Result<CMat> {
    let n = a1.nrows();
    if n == 0 {
        return Ok(linalg::zeros(0, rhs.ncols()));
    }
    let m = linalg::eye(n) * lambda - a1;
    let smin = linalg::smallest_singular_value(&m);
    if smin <= SPECTRUM_GUARD * linalg::norm(a1) || smin == 0.0 {
        return Err(VesselError::Resolvent { lambda, distance: smin });
    }
    linalg::solve(&m, rhs).ok_or(VesselError::Resolvent { lambda, distance: smin })
}

/// (λI − A₁(t₂))⁻¹B̃(t₂)σ₁(t₂).
pub fn resolvent_state(v: &DiffVessel, lambda: Complex64, t2: f64) -> Result<CMat> {
    let rhs = v.bt.eval(t2)? * v.sig.sigma1.eval(t2)?;
    resolvent_solve(&v.a1.eval(t2)?, lambda, &rhs)
}

/// S(λ, t₂) = D + C(λI − A₁)⁻¹B̃σ₁.
pub fn transfer(v: &DiffVessel, lambda: Complex64, t2: f64) -> Result<CMat> {
    let x = resolvent_state(v, lambda, t2)?;
    Ok(v.d.eval(t2)? + v.c.eval(t2)? * x)
}

/// ‖∂S/∂t₂ − σ₁*⁻¹(λσ₂* + γ*)S + Sσ₁⁻¹(λσ₂ + γ)‖ with a five-point central difference.
pub fn transfer_ode_residual(v: &DiffVessel, lambda: Complex64, t2: f64) -> Result<f64> {
    let g = v.grid();
    let h = g.spacing();
    if t2 - 2.0 * h < g.t_start() || t2 + 2.0 * h > g.t_end() {
        return Err(VesselError::Domain { t: t2, start: g.t_start() + 2.0 * h, end: g.t_end() - 2.0 * h });
    }
    let s = |t: f64| transfer(v, lambda, t);
    let ds = (s(t2 - 2.0 * h)? - s(t2 - h)? * c(8.0, 0.0) + s(t2 + h)? * c(8.0, 0.0) - s(t2 + 2.0 * h)?)
        / c(12.0 * h, 0.0);
    let s0 = s(t2)?;
    let out_gen = v.sig.output_ode().generator(lambda, t2)?;
    let in_gen = v.sig.input_ode().generator(lambda, t2)?;
    Ok(linalg::norm(&(ds - out_gen * &s0 + &s0 * in_gen)))
}

/// ‖S(λ,t₂)Φ(λ,t₂,t₀) − Φ*(λ,t₂,t₀)S(λ,t₀)‖.
pub fn check_intertwining(v: &DiffVessel, lambda: Complex64, t0: f64, t2: f64) -> Result<f64> {
    let phi = v.sig.input_ode().propagate(lambda, t0, t2)?;
    let phis = v.sig.output_ode().propagate(lambda, t0, t2)?;
    let lhs = transfer(v, lambda, t2)? * phi;
    let rhs = phis * transfer(v, lambda, t0)?;
    Ok(linalg::dist(&lhs, &rhs))
}
