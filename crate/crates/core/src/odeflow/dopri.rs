//! Dormand–Prince 5(4) with Hairer's dense output, for matrix-valued linear ODEs.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{c, CMat};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step; keeps the dense-output interpolant accurate between grid nodes.
    pub max_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 200_000, max_step: f64::INFINITY }
    }
}

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn lin(base: &CMat, h: f64, terms: &[(f64, &CMat)]) -> CMat {
    let mut out = base.clone();
    for &(w, k) in terms {
        if w != 0.0 {
            out += k * c(h * w, 0.0);
        }
    }
    out
}

fn err_norm(err: &CMat, y0: &CMat, y1: &CMat, tol: &Tolerances) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = tol.atol + tol.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at each of `t_out`.
///
/// `t_out` must be monotone and lie on one side of `t0` (either direction).
pub fn integrate<F>(mut f: F, t0: f64, y0: &CMat, t_out: &[f64], tol: &Tolerances) -> Result<Vec<CMat>>
where
    F: FnMut(f64, &CMat) -> Result<CMat>,
{
    let mut out = Vec::with_capacity(t_out.len());
    let Some(&t_last) = t_out.last() else {
        return Ok(out);
    };
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    let mut idx = 0;
    while idx < t_out.len() && t_out[idx] == t0 {
        out.push(y0.clone());
        idx += 1;
    }
    if idx == t_out.len() {
        return Ok(out);
    }
    let span = (t_last - t0).abs();

    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = f(t, &y)?;

    // initial step after Hairer's HINIT
    let mut h = {
        let scale = |m: &CMat| -> f64 {
            let n = m.len().max(1) as f64;
            (m.iter()
                .zip(y.iter())
                .map(|(v, yy)| (v.norm() / (tol.atol + tol.rtol * yy.norm())).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = scale(&y);
        let d1 = scale(&k1);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = lin(&y, dir * h0, &[(1.0, &k1)]);
        let f1 = f(t + dir * h0, &y1)?;
        let d2 = scale(&(&f1 - &k1)) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
        (100.0 * h0).min(h1).min(span).min(tol.max_step)
    };

    let mut steps = 0usize;
    let mut rejected_last = false;
    while idx < t_out.len() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(VesselError::Solver { t, reason: "too many steps" });
        }
        let remaining = (t_last - t).abs();
        if h > remaining {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(VesselError::Solver { t, reason: "step size underflow" });
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &lin(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &lin(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &lin(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * hs, &lin(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(
            t + hs,
            &lin(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = lin(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if h == remaining { t_last } else { t + hs };
        let k7 = f(t_new, &y_new)?;
        let err = lin(
            &CMat::zeros(y.nrows(), y.ncols()),
            hs,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let e = err_norm(&err, &y, &y_new, tol);
        if !e.is_finite() {
            h *= 0.2;
            rejected_last = true;
            continue;
        }
        if e <= 1.0 {
            // dense output coefficients
            let r2 = &y_new - &y;
            let r3 = &k1 * c(hs, 0.0) - &r2;
            let r4 = &r2 - &k7 * c(hs, 0.0) - &r3;
            let r5 = lin(
                &CMat::zeros(y.nrows(), y.ncols()),
                hs,
                &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)],
            );
            while idx < t_out.len() && dir * (t_out[idx] - t_new) <= 0.0 {
                let to = t_out[idx];
                if to == t_new {
                    out.push(y_new.clone());
                } else {
                    let th = (to - t) / hs;
                    let th1 = 1.0 - th;
                    let inner = &r4 + &r5 * c(th1, 0.0);
                    let inner = &r3 + inner * c(th, 0.0);
                    let inner = &r2 + inner * c(th1, 0.0);
                    out.push(&y + inner * c(th, 0.0));
                }
                idx += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let mut fac = 0.9 * e.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(tol.max_step);
            rejected_last = false;
        } else {
            h *= (0.9 * e.powf(-0.2)).max(0.2);
            rejected_last = true;
        }
    }
    Ok(out)
}

/// Values at every node of `nodes` for the solution through `(t0, y0)`;
/// integrates outward from `t0` in both directions.
pub fn integrate_nodes<F>(mut f: F, t0: f64, y0: &CMat, nodes: &[f64], tol: &Tolerances) -> Result<Vec<CMat>>
where
    F: FnMut(f64, &CMat) -> Result<CMat>,
{
    let mut tol = *tol;
    let spacing = nodes.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min);
    tol.max_step = tol.max_step.min(spacing);
    let tol = &tol;
    let split = nodes.partition_point(|&t| t < t0);
    let back: Vec<f64> = nodes[..split].iter().rev().copied().collect();
    let fwd = &nodes[split..];
    let mut below = integrate(&mut f, t0, y0, &back, tol)?;
    below.reverse();
    let above = integrate(&mut f, t0, y0, fwd, tol)?;
    below.extend(above);
    Ok(below)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgrid::linalg::{dist, from_real_rows, scalar};

    #[test]
    fn scalar_exponential_to_tolerance() {
        let lam = c(1.0, 1.0);
        let ts = [0.1, 0.35, 0.7, 1.0];
        let ys = integrate(|_, y| Ok(y * lam), 0.0, &scalar(c(1.0, 0.0)), &ts, &Tolerances::default()).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[(0, 0)] - (lam * *t).exp()).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn backward_and_both_directions() {
        let nodes: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ys = integrate_nodes(|_, y| Ok(y * c(-2.0, 0.0)), 0.45, &scalar(c(1.0, 0.0)), &nodes, &Tolerances::default())
            .unwrap();
        for (t, y) in nodes.iter().zip(&ys) {
            assert!((y[(0, 0)].re - (-2.0 * (t - 0.45)).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn time_dependent_rotation() {
        // y' = t J y with J the rotation generator: y(t) = R(t²/2) y0
        let j = from_real_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let y0 = from_real_rows(2, 1, &[1.0, 0.0]);
        let ys = integrate(|t, y| Ok(&j * y * c(t, 0.0)), 0.0, &y0, &[2.0], &Tolerances::default()).unwrap();
        let a: f64 = 2.0;
        let expect = from_real_rows(2, 1, &[a.cos(), a.sin()]);
        assert!(dist(&ys[0], &expect) < 1e-9);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let ts: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
        let ys = integrate(|_, y| Ok(y * c(0.0, 3.0)), 0.0, &scalar(c(1.0, 0.0)), &ts, &Tolerances::default()).unwrap();
        let worst = ts
            .iter()
            .zip(&ys)
            .map(|(t, y)| (y[(0, 0)] - c(0.0, 3.0 * t).exp()).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }
}
