use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};

pub const LAURENT_NODES: usize = 256;
/// Coefficients at or below this norm count as zero when detecting the order.
pub const ORDER_THRESHOLD: f64 = 1e-8;

/// Principal part of a Laurent expansion at `z`: `principal[k−1]` is S₋ₖ.
#[derive(Debug, Clone)]
pub struct LaurentData {
    pub z: Complex64,
    pub order: usize,
    pub principal: Vec<CMat>,
}

impl LaurentData {
    /// S₋ₖ for k ≥ 1 (zero beyond the computed range).
    pub fn coefficient(&self, k: usize) -> Option<&CMat> {
        if k == 0 {
            return None;
        }
        self.principal.get(k - 1)
    }

    pub fn max_norm(&self) -> f64 {
        self.principal.iter().map(linalg::norm).fold(0.0, f64::max)
    }
}

/// S₋ₖ = (1/2πi)∮S(λ)(λ−z)^{k−1}dλ on a circle of `radius` about `z`
/// (trapezoid rule) for k = 1..=max_order. One extra coefficient is
/// computed; if it exceeds [`ORDER_THRESHOLD`] the order overflows.
pub fn extract_pole_data(
    sampler: impl Fn(Complex64, f64) -> Result<CMat>,
    z: Complex64,
    max_order: usize,
    t2: f64,
    radius: f64,
) -> Result<LaurentData> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(VesselError::Contour { radius, distance: radius });
    }
    let kmax = max_order + 1;
    let mut coeffs: Vec<Option<CMat>> = alloc::vec![None; kmax];
    for j in 0..LAURENT_NODES {
        let w = Complex64::from_polar(radius, 2.0 * PI * j as f64 / LAURENT_NODES as f64);
        let s = sampler(z + w, t2)?;
        let mut p = w / LAURENT_NODES as f64;
        for slot in coeffs.iter_mut() {
            let term = &s * p;
            match slot {
                Some(acc) => *acc += term,
                None => *slot = Some(term),
            }
            p *= w;
        }
    }
    let mut principal: Vec<CMat> = coeffs.into_iter().map(|c| c.expect("at least one node")).collect();
    let extra = principal.pop().expect("kmax >= 1");
    let extra_norm = linalg::norm(&extra);
    if extra_norm > ORDER_THRESHOLD {
        return Err(VesselError::OrderOverflow { order: max_order + 1, norm: extra_norm });
    }
    let order = principal.iter().rposition(|m| linalg::norm(m) > ORDER_THRESHOLD).map_or(0, |i| i + 1);
    Ok(LaurentData { z, order, principal })
}
