use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::vesselcore::DiffVessel;

/// C(t₂)A₁ⁿ(t₂)B̃(t₂) for n = 0..kmax−1.
pub fn moments(v: &DiffVessel, t2: f64, kmax: usize) -> Result<Vec<CMat>> {
    if kmax == 0 {
        return Err(VesselError::Precondition(String::from("moments need kmax >= 1")));
    }
    let a = v.a1.eval(t2)?;
    let c = v.c.eval(t2)?;
    let mut x = v.bt.eval(t2)?;
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        out.push(&c * &x);
        x = &a * x;
    }
    Ok(out)
}

fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    linalg::dist(a, b) <= tol * (1.0 + linalg::norm(a).max(linalg::norm(b)))
}

/// Equality of transfer functions near ∞ at `t2_samples` times: same D, D̃ and
/// moments up to order n₁+n₂. The signatures must agree.
pub fn equivalent(v1: &DiffVessel, v2: &DiffVessel, t2_samples: usize, tol: f64) -> Result<bool> {
    if v1.grid() != v2.grid() || !crate::vesselops::same_signature(&v1.sig, &v2.sig, tol) {
        return Err(VesselError::Precondition(format!(
            "vessels have different signatures (distance {:e})",
            v1.sig.max_dist(&v2.sig)
        )));
    }
    if v1.d.max_dist(&v2.d) > tol * (1.0 + v1.d.max_norm()) || v1.dt.max_dist(&v2.dt) > tol * (1.0 + v1.dt.max_norm()) {
        return Ok(false);
    }
    let order = (v1.state_dim() + v2.state_dim()).max(1);
    for t in v1.grid().samples(t2_samples.max(1)) {
        let m1 = moments(v1, t, order)?;
        let m2 = moments(v2, t, order)?;
        if m1.iter().zip(&m2).any(|(a, b)| !close(a, b, tol)) {
            return Ok(false);
        }
    }
    Ok(true)
}
