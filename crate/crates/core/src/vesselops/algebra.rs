use alloc::format;
use alloc::string::String;
use num_complex::Complex64;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, c, CMat};
use crate::numgrid::{MatFn, DEFAULT_COND_LIMIT};
use crate::vesselcore::{transfer, DiffVessel, Signature};

/// Node-wise tolerance for the cascade compatibility conditions.
pub const COMPAT_TOL: f64 = 1e-10;

fn stack(blocks: &[&[&CMat]]) -> CMat {
    let rows: usize = blocks.iter().map(|r| r[0].nrows()).sum();
    let cols: usize = blocks[0].iter().map(|m| m.ncols()).sum();
    let mut out = linalg::zeros(rows, cols);
    let mut r0 = 0;
    for row in blocks {
        let mut c0 = 0;
        for m in row.iter() {
            out.view_mut((r0, c0), m.shape()).copy_from(*m);
            c0 += m.ncols();
        }
        r0 += row[0].nrows();
    }
    out
}

fn pointwise(grid_src: &MatFn, f: impl Fn(usize) -> CMat) -> MatFn {
    MatFn::from_samples(*grid_src.grid(), (0..grid_src.grid().points()).map(f).collect())
        .expect("block assembly keeps a uniform shape")
}

/// Series connection: the output of `v1` feeds the input of `v2`, S = S″S′.
pub fn cascade(v1: &DiffVessel, v2: &DiffVessel) -> Result<DiffVessel> {
    if v1.grid() != v2.grid() {
        return Err(VesselError::Precondition(String::from("cascade factors live on different grids")));
    }
    if v1.output_dim() != v2.input_dim() {
        return Err(VesselError::Precondition(format!(
            "output dimension {} of the first factor differs from input dimension {} of the second",
            v1.output_dim(),
            v2.input_dim()
        )));
    }
    let (s1, s2) = (&v1.sig, &v2.sig);
    for (name, a, b) in [
        ("sigma1s/sigma1", &s1.sigma1s, &s2.sigma1),
        ("sigma2s/sigma2", &s1.sigma2s, &s2.sigma2),
        ("gammas/gamma", &s1.gammas, &s2.gamma),
    ] {
        for k in 0..a.grid().points() {
            let d = linalg::dist(a.sample(k), b.sample(k));
            if d > COMPAT_TOL {
                return Err(VesselError::Precondition(format!(
                    "cascade incompatible: {name} differ by {d:e} at node {k}"
                )));
            }
        }
    }
    let (n1, n2) = (v1.state_dim(), v2.state_dim());
    let z12 = linalg::zeros(n1, n2);
    let block_op = |a_first: &MatFn, a_second: &MatFn, sigma: &MatFn| {
        pointwise(a_first, |k| {
            let coupling = v2.bt.sample(k) * sigma.sample(k) * v1.c.sample(k);
            stack(&[&[a_first.sample(k), &z12], &[&coupling, a_second.sample(k)]])
        })
    };
    let a1 = block_op(&v1.a1, &v2.a1, &s2.sigma1);
    let a2 = block_op(&v1.a2, &v2.a2, &s2.sigma2);
    let bt = pointwise(&v1.bt, |k| {
        let lower = v2.bt.sample(k) * v1.dt.sample(k);
        stack(&[&[v1.bt.sample(k)], &[&lower]])
    });
    let cm = pointwise(&v1.c, |k| {
        let left = v2.d.sample(k) * v1.c.sample(k);
        stack(&[&[&left, v2.c.sample(k)]])
    });
    let d = v2.d.mul(&v1.d);
    let dt = v2.dt.mul(&v1.dt);
    DiffVessel::new(a1, a2, bt, cm, d, dt, s1.with_output_of(s2))
}

/// Inverse vessel: S×S = I. Input and output signature families swap.
pub fn invert(v: &DiffVessel) -> Result<DiffVessel> {
    let dinv = v.d.inverse_named("D", DEFAULT_COND_LIMIT)?;
    let dtinv = v.dt.inverse_named("Dt", DEFAULT_COND_LIMIT)?;
    let minus_one = c(-1.0, 0.0);
    let corr = |sigma: &MatFn| {
        pointwise(&v.a1, |k| v.bt.sample(k) * sigma.sample(k) * dinv.sample(k) * v.c.sample(k))
    };
    let a1 = v.a1.sub(&corr(&v.sig.sigma1));
    let a2 = v.a2.sub(&corr(&v.sig.sigma2));
    let bt = v.bt.mul(&dtinv);
    let cm = dinv.mul(&v.c).scale(minus_one);
    DiffVessel::new(a1, a2, bt, cm, dinv, dtinv, v.sig.swapped())
}

/// Adjoint vessel (−A₁ᴴ, −A₂ᴴ, −Cᴴ, B̃ᴴ, D̃ᴴ, Dᴴ) with the adjoint signature.
pub fn adjoint(v: &DiffVessel) -> Result<DiffVessel> {
    let minus_one = c(-1.0, 0.0);
    DiffVessel::new(
        v.a1.adjoint().scale(minus_one),
        v.a2.adjoint().scale(minus_one),
        v.c.adjoint().scale(minus_one),
        v.bt.adjoint(),
        v.dt.adjoint(),
        v.d.adjoint(),
        v.sig.adjoint(),
    )
}

/// ‖S(λ,t₂) − σ₁*⁻¹S*ᴴ(−λ̄,t₂)σ₁‖ where S* is the adjoint vessel's transfer.
pub fn adjoint_relation_check(v: &DiffVessel, adj: &DiffVessel, lambda: Complex64, t2: f64) -> Result<f64> {
    let s = transfer(v, lambda, t2)?;
    let sa = transfer(adj, -lambda.conj(), t2)?;
    let s1s = v.sig.sigma1s.eval(t2)?;
    let rhs = linalg::solve(&s1s, &(sa.adjoint() * v.sig.sigma1.eval(t2)?))
        .ok_or(VesselError::Solver { t: t2, reason: "sigma1s is singular" })?;
    Ok(linalg::dist(&s, &rhs))
}

/// Gauge by T(t₂): Ǎ₁ = TA₁T⁻¹, Ǎ₂ = TA₂T⁻¹ + T′T⁻¹, B̌ = TB̃, Č = CT⁻¹.
pub fn gauge_transform(v: &DiffVessel, t: &MatFn) -> Result<DiffVessel> {
    let n = v.state_dim();
    if t.shape() != (n, n) || t.grid() != v.grid() {
        return Err(VesselError::Shape {
            what: String::from("T"),
            detail: format!("expected {n}x{n} on the vessel grid, got {:?}", t.shape()),
        });
    }
    let tinv = t.inverse_named("T", DEFAULT_COND_LIMIT)?;
    let dt = t.derivative();
    let a1 = t.mul(&v.a1).mul(&tinv);
    let a2 = t.mul(&v.a2).mul(&tinv).add(&dt.mul(&tinv));
    DiffVessel::new(a1, a2, t.mul(&v.bt), v.c.mul(&tinv), v.d.clone(), v.dt.clone(), v.sig.clone())
}

/// Signature check used by several operations.
pub(crate) fn same_signature(a: &Signature, b: &Signature, tol: f64) -> bool {
    a.max_dist(b) <= tol
}
