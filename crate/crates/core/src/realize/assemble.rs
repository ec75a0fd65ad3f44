use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, DEFAULT_COND_LIMIT};
use crate::odeflow::dopri::{integrate_nodes, Tolerances};
use crate::odeflow::{solve_companion_chain, ChainSide};
use crate::vesselcore::{verify_vessel, DiffVessel, Signature};

/// Residual bound for chain and triple relations, relative to the data scale.
pub const CHAIN_TOL: f64 = 1e-7;
/// Bound on the linkage residuals of assembled data, relative to the data scale.
pub const LINKAGE_TOL: f64 = 1e-7;

/// Jordan chain data at one pole: output columns c₀, …, c_{n−1} and input
/// vectors b₀, …, b_{n−1}, each solving the companion chain of its side.
#[derive(Debug, Clone)]
pub struct PoleChain {
    pub z: Complex64,
    pub out_chain: Vec<MatFn>,
    pub in_chain: Vec<MatFn>,
}

/// Local realization (X, T, Y) at a pole: X is e*×m, T constant m×m, Y is m×e.
#[derive(Debug, Clone)]
pub struct PoleTriple {
    pub x: MatFn,
    pub t: CMat,
    pub y: MatFn,
}

impl PoleChain {
    /// Solves both chains from seeds at `t0`.
    pub fn solve(sig: &Signature, z: Complex64, t0: f64, out_seeds: &[CMat], in_seeds: &[CMat]) -> Result<Self> {
        if out_seeds.len() != in_seeds.len() {
            return Err(VesselError::Precondition(format!(
                "chains of different lengths ({} output, {} input seeds)",
                out_seeds.len(),
                in_seeds.len()
            )));
        }
        let n = out_seeds.len();
        Ok(Self {
            z,
            out_chain: solve_companion_chain(sig, z, n, ChainSide::Output, t0, out_seeds)?,
            in_chain: solve_companion_chain(sig, z, n, ChainSide::Input, t0, in_seeds)?,
        })
    }

    pub fn order(&self) -> usize {
        self.out_chain.len()
    }

    /// Jordan block zI + N with ones on the superdiagonal; C has columns
    /// (−1)ⁱcᵢ and B̃ has row n−1−i equal to bᵢᴴ. The coefficient of
    /// (λ−z)⁻ⁿ in C(λ−T)⁻¹B̃σ₁ is then c₀b₀ᴴσ₁.
    pub fn to_triple(&self) -> Result<PoleTriple> {
        let n = self.order();
        if n == 0 || self.in_chain.len() != n {
            return Err(VesselError::Precondition(format!(
                "pole chain needs equal nonzero lengths, got {} and {}",
                n,
                self.in_chain.len()
            )));
        }
        let grid = *self.out_chain[0].grid();
        let es = self.out_chain[0].rows();
        let e = self.in_chain[0].rows();
        let mut t = linalg::eye(n) * self.z;
        for j in 1..n {
            t[(j - 1, j)] = linalg::ONE;
        }
        let mut xs = Vec::with_capacity(grid.points());
        let mut ys = Vec::with_capacity(grid.points());
        for k in 0..grid.points() {
            let mut x = linalg::zeros(es, n);
            let mut y = linalg::zeros(n, e);
            for i in 0..n {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                x.set_column(i, &(self.out_chain[i].sample(k).column(0) * linalg::c(sign, 0.0)));
                y.set_row(n - 1 - i, &self.in_chain[i].sample(k).column(0).adjoint());
            }
            xs.push(x);
            ys.push(y);
        }
        Ok(PoleTriple { x: MatFn::from_samples(grid, xs)?, t, y: MatFn::from_samples(grid, ys)? })
    }
}

impl PoleTriple {
    pub fn size(&self) -> usize {
        self.t.nrows()
    }

    /// Largest relative residual of σ₁*X′ = σ₂*XT + γ*X and
    /// (Yσ₁)′ = −TYσ₂ − Yγ over the grid.
    pub fn residual(&self, sig: &Signature) -> f64 {
        let dx = self.x.derivative();
        let ys1 = self.y.mul(&sig.sigma1);
        let dys1 = ys1.derivative();
        let scale = 1.0 + self.x.max_norm() + self.y.max_norm();
        let mut worst: f64 = 0.0;
        for k in 0..self.x.grid().points() {
            let x = self.x.sample(k);
            let y = self.y.sample(k);
            let out = sig.sigma1s.sample(k) * dx.sample(k)
                - sig.sigma2s.sample(k) * x * &self.t
                - sig.gammas.sample(k) * x;
            let inp = dys1.sample(k) + &self.t * y * sig.sigma2.sample(k) + y * sig.gamma.sample(k);
            worst = worst.max(linalg::norm(&out)).max(linalg::norm(&inp));
        }
        worst / scale
    }

    /// X(λI − T)⁻¹Yσ₁ at t₂.
    pub fn local_part(&self, sig: &Signature, lambda: Complex64, t2: f64) -> Result<CMat> {
        let m = linalg::eye(self.size()) * lambda - &self.t;
        let rhs = self.y.eval(t2)? * sig.sigma1.eval(t2)?;
        let x = linalg::solve(&m, &rhs).ok_or(VesselError::Resolvent { lambda, distance: 0.0 })?;
        Ok(self.x.eval(t2)? * x)
    }
}

fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = linalg::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), b.shape()).copy_from(*b);
        o += b.nrows();
    }
    out
}

/// D̃ = σ₁*Dσ₁⁻¹, forced by the first linkage condition.
pub fn companion_feedthrough(d: &MatFn, sig: &Signature) -> Result<MatFn> {
    let s1inv = sig.sigma1.inverse_named("sigma1", DEFAULT_COND_LIMIT)?;
    Ok(sig.sigma1s.mul(d).mul(&s1inv))
}

/// Integrates the third linkage condition as an ODE for D from `d0` at `t0`:
/// σ₁*D′ = σ₂*Kσ₁ − σ₁*Kσ₂ + γ*D − D̃γ with K = CB̃ and D̃ = σ₁*Dσ₁⁻¹.
/// The second condition σ₂*D = D̃σ₂ is not enforced here.
pub fn solve_feedthrough(sig: &Signature, cb: &MatFn, d0: &CMat, t0: f64) -> Result<MatFn> {
    let grid = *sig.grid();
    let s1inv = sig.sigma1.inverse_named("sigma1", DEFAULT_COND_LIMIT)?;
    sig.sigma1s.check_invertible("sigma1s", DEFAULT_COND_LIMIT)?;
    let rhs = |t: f64, d: &CMat| -> Result<CMat> {
        let (s1, s2, g) = (sig.sigma1.eval(t)?, sig.sigma2.eval(t)?, sig.gamma.eval(t)?);
        let (s1s, s2s, gs) = (sig.sigma1s.eval(t)?, sig.sigma2s.eval(t)?, sig.gammas.eval(t)?);
        let k = cb.eval(t)?;
        let dt = &s1s * d * s1inv.eval(t)?;
        let v = &s2s * &k * &s1 - &s1s * &k * &s2 + gs * d - dt * g;
        linalg::solve(&s1s, &v).ok_or(VesselError::Solver { t, reason: "sigma1s is singular" })
    };
    let ys = integrate_nodes(rhs, t0, d0, &grid.nodes(), &Tolerances::default())?;
    MatFn::from_samples(grid, ys)
}

/// Direct sum of pole triples: A₁ = diag(Tᵢ), A₂ = 0, C = [Xᵢ], B̃ = [Yᵢ].
pub fn realize_mittag_leffler(triples: &[PoleTriple], d: &MatFn, sig: &Signature) -> Result<DiffVessel> {
    let grid = *sig.grid();
    let (e, es) = (sig.input_dim(), sig.output_dim());
    for (i, tr) in triples.iter().enumerate() {
        if tr.x.rows() != es || tr.y.cols() != e || tr.x.cols() != tr.size() || tr.y.rows() != tr.size() {
            return Err(VesselError::Shape {
                what: format!("pole triple {i}"),
                detail: format!("X {:?}, T {:?}, Y {:?} against e={e}, e*={es}", tr.x.shape(), tr.t.shape(), tr.y.shape()),
            });
        }
        let r = tr.residual(sig);
        if !(r <= CHAIN_TOL) {
            return Err(VesselError::InvalidChain { residual: r, tol: CHAIN_TOL });
        }
    }
    let n: usize = triples.iter().map(|t| t.size()).sum();
    let a1 = block_diag(&triples.iter().map(|t| &t.t).collect::<Vec<_>>());
    let mut cs = Vec::with_capacity(grid.points());
    let mut bs = Vec::with_capacity(grid.points());
    for k in 0..grid.points() {
        let mut c = linalg::zeros(es, n);
        let mut b = linalg::zeros(n, e);
        let mut o = 0;
        for tr in triples {
            c.view_mut((0, o), (es, tr.size())).copy_from(tr.x.sample(k));
            b.view_mut((o, 0), (tr.size(), e)).copy_from(tr.y.sample(k));
            o += tr.size();
        }
        cs.push(c);
        bs.push(b);
    }
    let (c, bt) = if n == 0 {
        (MatFn::zeros(grid, es, 0), MatFn::zeros(grid, 0, e))
    } else {
        (MatFn::from_samples(grid, cs)?, MatFn::from_samples(grid, bs)?)
    };
    let dt = companion_feedthrough(d, sig)?;
    let v = DiffVessel::new(MatFn::constant(grid, a1), MatFn::zeros(grid, n, n), bt, c, d.clone(), dt, sig.clone())?;
    let rep = verify_vessel(&v, LINKAGE_TOL);
    let scale = 1.0 + v.d.max_norm() + v.c.max_norm() * v.bt.max_norm();
    let link = [rep.linkage1, rep.linkage2, rep.linkage3];
    if link.iter().any(|&x| !(x <= LINKAGE_TOL * scale)) {
        return Err(VesselError::Linkage { residuals: link });
    }
    Ok(v)
}

/// One Jordan block from a pole chain.
pub fn realize_single_pole(chain: &PoleChain, d: &MatFn, sig: &Signature) -> Result<DiffVessel> {
    realize_mittag_leffler(&[chain.to_triple()?], d, sig)
}

/// Seeds of a simple pole: the chain members at the base time.
#[derive(Debug, Clone)]
pub struct SimplePole {
    pub z: Complex64,
    pub out_seed: CMat,
    pub in_seed: CMat,
}

/// Realization with simple poles whose D solves the third linkage condition
/// from `d0` at `t0`.
pub fn realize_simple_poles(sig: &Signature, poles: &[SimplePole], d0: &CMat, t0: f64) -> Result<DiffVessel> {
    let mut triples = Vec::with_capacity(poles.len());
    for p in poles {
        let chain = PoleChain::solve(sig, p.z, t0, core::slice::from_ref(&p.out_seed), core::slice::from_ref(&p.in_seed))?;
        triples.push(chain.to_triple()?);
    }
    let grid = *sig.grid();
    let (e, es) = (sig.input_dim(), sig.output_dim());
    let cb = MatFn::from_samples(
        grid,
        (0..grid.points())
            .map(|k| {
                let mut acc = linalg::zeros(es, e);
                for tr in &triples {
                    acc += tr.x.sample(k) * tr.y.sample(k);
                }
                acc
            })
            .collect(),
    )?;
    let d = solve_feedthrough(sig, &cb, d0, t0)?;
    realize_mittag_leffler(&triples, &d, sig)
}
