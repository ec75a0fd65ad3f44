use std::vec::Vec;

use super::*;
use crate::fixtures;
use crate::numgrid::linalg::{self, c, dist, from_real_rows, scalar, CMat};
use crate::numgrid::{MatFn, TimeGrid};

#[test]
fn trivial_and_scalar_semigroups() {
    let g = TimeGrid::unit();
    let zero = MatFn::zeros(g, 3, 3);
    assert_eq!(evolution_semigroup(&zero, 0.0, 1.0).unwrap(), linalg::eye(3));
    let a = MatFn::constant(g, scalar(c(0.7, -0.2)));
    let f = evolution_semigroup(&a, 0.0, 1.0).unwrap();
    assert!((f[(0, 0)] - c(0.7, -0.2).exp()).norm() < 1e-9);
}

#[test]
fn semigroup_cocycle() {
    let g = TimeGrid::unit();
    let m = from_real_rows(3, 3, &[0.1, -0.4, 0.2, 0.3, 0.0, -0.5, 0.25, 0.1, -0.2]);
    let a = MatFn::constant(g, m);
    let tsr = evolution_semigroup(&a, 0.4, 1.0).unwrap();
    let srr = evolution_semigroup(&a, 0.0, 0.4).unwrap();
    let tr = evolution_semigroup(&a, 0.0, 1.0).unwrap();
    assert!(dist(&(tsr * srr), &tr) < 1e-8);
}

#[test]
fn time_varying_flow_matches_expm_of_integral_for_commuting_generator() {
    // A₂(t) = t·M commutes with itself, so F(t,0) = exp(t²/2 · M)
    let g = TimeGrid::unit();
    let m = from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.5]);
    let a = MatFn::from_fn(g, |t| &m * c(t, 0.0)).unwrap();
    let flow = evolution_flow(&a, 0.0).unwrap();
    for i in [10, 64, 128] {
        let t = g.node(i);
        assert!(dist(flow.sample(i), &linalg::expm(&(&m * c(t * t / 2.0, 0.0)))) < 1e-9);
    }
}

#[test]
fn v0_fundamental_is_identity() {
    let sig = fixtures::v0_signature(TimeGrid::unit());
    let phi = fundamental_input(&sig, c(2.0, 1.0), 0.0).unwrap();
    assert!(phi.flow.max_dist(&MatFn::identity(TimeGrid::unit(), 1)) < 1e-14);
    let psi = fundamental_adjoint_input(&sig, c(-1.0, 3.0), 0.0).unwrap();
    assert!(psi.flow.max_dist(&MatFn::identity(TimeGrid::unit(), 1)) < 1e-14);
}

#[test]
fn va_and_vg_closed_forms() {
    let lam = c(1.0, 1.0);
    let sig = fixtures::vg_signature(TimeGrid::unit(), 0.0);
    let phi = fundamental_input(&sig, lam, 0.0).unwrap();
    assert!((phi.at(0.7).unwrap()[(0, 0)] - (lam * 0.7).exp()).norm() < 1e-8);
    assert_eq!(phi.at(0.0).unwrap(), scalar(c(1.0, 0.0)));
    let g = 0.8;
    let sig = fixtures::vg_signature(TimeGrid::unit(), g);
    let phis = fundamental_output(&sig, lam, 0.0).unwrap();
    for i in [0, 33, 100, 128] {
        let t = TimeGrid::unit().node(i);
        assert!((phis.flow.sample(i)[(0, 0)] - ((lam + g) * t).exp()).norm() < 1e-8);
    }
}

pub(crate) fn random_signature(seed: u64, points: usize) -> crate::vesselcore::Signature {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = TimeGrid::new(0.0, 1.0, points).unwrap();
    let mut smooth = |n: usize, base: Option<CMat>| {
        let a: Vec<f64> = (0..4 * n * n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b = base.clone();
        MatFn::from_fn(g, move |t| {
            let mut m = CMat::from_fn(n, n, |i, j| {
                let k = 4 * (i * n + j);
                c(a[k] + a[k + 1] * (3.0 * t).sin(), a[k + 2] + a[k + 3] * t * t)
            });
            if let Some(b) = &b {
                m += b;
            }
            m
        })
        .unwrap()
    };
    let id = linalg::eye(2) * c(2.0, 0.0);
    crate::vesselcore::Signature::new(
        smooth(2, Some(id.clone())),
        smooth(2, None),
        smooth(2, None),
        smooth(2, Some(id)),
        smooth(2, None),
        smooth(2, None),
    )
    .unwrap()
}

#[test]
fn lemma_identities_on_random_signature() {
    let sig = random_signature(7, 129);
    let lam = c(0.6, -1.1);
    let phi = fundamental_input(&sig, lam, 0.0).unwrap();
    let inv = phi.flow.inverse_fn(1e12).unwrap();
    let d_inv = inv.derivative();
    let d_phi = phi.flow.derivative();
    let mut worst: f64 = 0.0;
    for k in 0..129 {
        let t = phi.flow.grid().node(k);
        let gen = sig.input_ode().generator(lam, t).unwrap();
        worst = worst.max(linalg::norm(&(d_phi.sample(k) - &gen * phi.flow.sample(k))));
        worst = worst.max(linalg::norm(&(d_inv.sample(k) + inv.sample(k) * &gen)));
    }
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn adjoint_relation_for_fundamental_matrices() {
    // σ₁*⁻ᴴ(t)Φ*⁻ᴴ(λ,t,t₀) = Ψ(−λ̄,t,t₀)σ₁*⁻ᴴ(t₀)
    for sig in [fixtures::vg_signature(TimeGrid::unit(), 1.0), random_signature(11, 129)] {
        let lam = c(0.3, 0.9);
        let phis = fundamental_output(&sig, lam, 0.0).unwrap();
        let psi = fundamental_adjoint_input(&sig, -lam.conj(), 0.0).unwrap();
        let s0 = linalg::inverse(&sig.sigma1s.sample(0).adjoint()).unwrap();
        let mut worst: f64 = 0.0;
        for k in (0..129).step_by(8) {
            let lhs = linalg::inverse(&sig.sigma1s.sample(k).adjoint()).unwrap()
                * linalg::inverse(&phis.flow.sample(k).adjoint()).unwrap();
            worst = worst.max(dist(&lhs, &(psi.flow.sample(k) * &s0)));
        }
        assert!(worst < 1e-7, "{worst}");
    }
}

#[test]
fn companion_chain_closed_form() {
    let sig = fixtures::vg_signature(TimeGrid::unit(), 0.0);
    let z = c(0.5, -0.25);
    let (kappa, alpha) = (c(1.5, 0.0), c(-0.5, 1.0));
    let chain = solve_companion_chain(&sig, z, 2, ChainSide::Output, 0.0, &[scalar(kappa), scalar(alpha)]).unwrap();
    for k in [0, 50, 128] {
        let t = TimeGrid::unit().node(k);
        let e = (z * t).exp();
        assert!((chain[0].sample(k)[(0, 0)] - kappa * e).norm() < 1e-8);
        assert!((chain[1].sample(k)[(0, 0)] - (alpha - kappa * t) * e).norm() < 1e-8);
    }
    assert!(chain_residual(&sig.output_ode(), z, &chain) < 1e-7);
}

#[test]
fn chain_without_driving_term() {
    let sig = fixtures::v0_signature(TimeGrid::unit());
    let seeds = [scalar(c(1.0, 0.0)), scalar(c(2.0, 0.0)), scalar(c(0.0, 1.0))];
    let chain = solve_companion_chain(&sig, c(0.3, 0.0), 3, ChainSide::Output, 0.5, &seeds).unwrap();
    for (m, s) in chain.iter().zip(&seeds) {
        assert!(m.max_dist(&MatFn::constant(TimeGrid::unit(), s.clone())) < 1e-12);
    }
    let single = solve_companion_chain(&sig, c(0.3, 0.0), 1, ChainSide::Input, 0.0, &seeds[..1]).unwrap();
    assert_eq!(single.len(), 1);
    assert!(solve_companion_chain(&sig, c(0.3, 0.0), 2, ChainSide::Input, 0.0, &seeds[..1]).is_err());
}
