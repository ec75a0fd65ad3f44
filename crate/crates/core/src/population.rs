//! Random vessels for property checks. Signatures have e = e* inputs with
//! σ₁ = σ₁* = I, σ₂ = σ₂* = s(t₂)I (|s| ≤ 1) and constant γ, γ* of norm ≤ 1.
//! Vessels carry simple poles in the closed unit disc and D solving the
//! linkage ODE D′ = γ*D − Dγ with D̃ = D.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use rand::Rng;

use crate::error::Result;
use crate::numgrid::linalg::{self, c, CMat};
use crate::numgrid::{MatFn, TimeGrid};
use crate::realize::{realize_simple_poles, SimplePole};
use crate::vesselcore::{DiffVessel, Signature};
use crate::vesselops::{cascade, gauge_transform, SubspaceFamily, SubspaceKind};
use crate::Complex64;

fn unit_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Matrix with Frobenius norm ≤ `bound`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: f64) -> CMat {
    let m = CMat::from_fn(rows, cols, |_, _| unit_complex(rng));
    let n = linalg::norm(&m);
    let r = rng.gen_range(0.0..=1.0) * bound;
    if n == 0.0 {
        m
    } else {
        m * c(r / n, 0.0)
    }
}

/// Point in the closed unit disc.
pub fn random_pole<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.gen_range(0.0f64..=1.0).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..core::f64::consts::TAU))
}

/// Input family (I, s(t)I, γ) with a fresh γ; `s` is shared by both sides.
fn scalar_sigma2<R: Rng + ?Sized>(rng: &mut R, grid: TimeGrid, e: usize) -> MatFn {
    let a = rng.gen_range(0.0..=1.0);
    let s0 = Complex64::from_polar(a, rng.gen_range(0.0..core::f64::consts::TAU));
    let s1 = Complex64::from_polar((1.0 - a) * rng.gen_range(0.0..=1.0), rng.gen_range(0.0..core::f64::consts::TAU));
    let span = grid.t_end() - grid.t_start();
    MatFn::from_fn(grid, |t| linalg::eye(e) * (s0 + s1 * ((t - grid.t_start()) / span))).expect("finite")
}

pub fn random_signature<R: Rng + ?Sized>(rng: &mut R, grid: TimeGrid, e: usize) -> Signature {
    let id = MatFn::identity(grid, e);
    let s2 = scalar_sigma2(rng, grid, e);
    let g = MatFn::constant(grid, random_matrix(rng, e, e, 1.0));
    let gs = MatFn::constant(grid, random_matrix(rng, e, e, 1.0));
    Signature::new(id.clone(), s2.clone(), g, id, s2, gs).expect("square blocks")
}

/// Same σ₁, σ₂ as `input`, input γ taken from its output side, fresh γ*.
pub fn following_signature<R: Rng + ?Sized>(rng: &mut R, input: &Signature) -> Signature {
    let e = input.output_dim();
    let gs = MatFn::constant(*input.grid(), random_matrix(rng, e, e, 1.0));
    Signature::new(
        input.sigma1s.clone(),
        input.sigma2s.clone(),
        input.gammas.clone(),
        input.sigma1s.clone(),
        input.sigma2s.clone(),
        gs,
    )
    .expect("square blocks")
}

fn random_feedthrough<R: Rng + ?Sized>(rng: &mut R, e: usize) -> CMat {
    linalg::eye(e) + random_matrix(rng, e, e, 0.3)
}

/// Vessel with the given simple poles and random chain seeds of unit scale.
pub fn random_vessel_with_poles<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, poles: &[Complex64]) -> Result<DiffVessel> {
    let (e, es) = (sig.input_dim(), sig.output_dim());
    let t0 = sig.grid().t_start();
    let data: Vec<SimplePole> = poles
        .iter()
        .map(|&z| SimplePole {
            z,
            out_seed: CMat::from_fn(es, 1, |_, _| unit_complex(rng)),
            in_seed: CMat::from_fn(e, 1, |_, _| unit_complex(rng)),
        })
        .collect();
    realize_simple_poles(sig, &data, &random_feedthrough(rng, es), t0)
}

/// Vessel with 1..=`max_poles` random simple poles.
pub fn random_vessel<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, max_poles: usize) -> Result<DiffVessel> {
    let count = rng.gen_range(1..=max_poles.max(1));
    let poles: Vec<Complex64> = (0..count).map(|_| random_pole(rng)).collect();
    random_vessel_with_poles(rng, sig, &poles)
}

/// Two vessels where the output family of the first is the input family of the second.
pub fn random_cascade_pair<R: Rng + ?Sized>(
    rng: &mut R,
    grid: TimeGrid,
    e: usize,
    max_poles: usize,
) -> Result<(DiffVessel, DiffVessel)> {
    let s1 = random_signature(rng, grid, e);
    let s2 = following_signature(rng, &s1);
    Ok((random_vessel(rng, &s1, max_poles)?, random_vessel(rng, &s2, max_poles)?))
}

fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    loop {
        let m = CMat::from_fn(n, n, |_, _| unit_complex(rng));
        if linalg::smallest_singular_value(&m) > 1e-3 {
            return linalg::qr_positive(&m);
        }
    }
}

/// A 2-pole vessel with a known factorization: the cascade of two 1-pole
/// vessels, mixed by a constant unitary U. Returns (vessel, 𝒢, 𝒢×) with
/// 𝒢 = U·span{e₂} invariant and 𝒢× = U·span{e₁} co-invariant.
pub fn factorable_vessel<R: Rng + ?Sized>(
    rng: &mut R,
    grid: TimeGrid,
    e: usize,
) -> Result<(DiffVessel, SubspaceFamily, SubspaceFamily)> {
    let s1 = random_signature(rng, grid, e);
    let s2 = following_signature(rng, &s1);
    let (z1, z2) = (random_pole(rng), random_pole(rng));
    let v1 = random_vessel_with_poles(rng, &s1, &[z1])?;
    let v2 = random_vessel_with_poles(rng, &s2, &[z2])?;
    let joined = cascade(&v1, &v2)?;
    let u = random_unitary(rng, 2);
    let mixed = gauge_transform(&joined, &MatFn::constant(grid, u.clone()))?;
    let g = SubspaceFamily::constant(grid, &u.columns(1, 1).into_owned(), SubspaceKind::Invariant)?;
    let gx = SubspaceFamily::constant(grid, &u.columns(0, 1).into_owned(), SubspaceKind::CoInvariant)?;
    Ok((mixed, g, gx))
}
