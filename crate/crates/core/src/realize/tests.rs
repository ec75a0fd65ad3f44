use super::*;
use crate::fixtures;
use crate::numgrid::linalg::{self, c, from_rows, scalar, CMat};
use crate::numgrid::{MatFn, TimeGrid};
use crate::vesselcore::{check_intertwining, transfer, verify_vessel, Signature, DEFAULT_TOL};
use crate::{Complex64, VesselError};
#[allow(unused_imports)]
use num_traits::Float;

fn k(x: f64) -> MatFn {
    MatFn::constant(TimeGrid::unit(), scalar(c(x, 0.0)))
}

fn one() -> CMat {
    scalar(c(1.0, 0.0))
}

fn zero() -> CMat {
    scalar(c(0.0, 0.0))
}

#[test]
fn scalar_chain_at_zero() {
    let sig = fixtures::vg_signature(TimeGrid::unit(), 0.0);
    let chain = PoleChain::solve(&sig, c(0.0, 0.0), 0.0, &[one()], &[one()]).unwrap();
    let v = realize_single_pole(&chain, &k(1.0), &sig).unwrap();
    assert!(v.c.max_dist(&k(1.0)) < 1e-12 && v.bt.max_dist(&k(1.0)) < 1e-12);
    let s = transfer(&v, c(2.0, 0.0), 0.6).unwrap();
    assert!((s[(0, 0)] - c(1.5, 0.0)).norm() < 1e-12);
}

#[test]
fn order_two_leading_coefficient() {
    let sig = fixtures::vg_signature(TimeGrid::unit(), 0.0);
    let chain = PoleChain::solve(&sig, c(0.0, 0.0), 0.0, &[one(), zero()], &[one(), zero()]).unwrap();
    let v = realize_single_pole(&chain, &k(1.0), &sig).unwrap();
    let rep = verify_vessel(&v, DEFAULT_TOL);
    assert!(rep.pass, "{:?}", rep.named());
    for t2 in [0.0, 0.4, 1.0] {
        let lp = extract_pole_data(|l, t| transfer(&v, l, t), c(0.0, 0.0), 3, t2, 0.5).unwrap();
        assert_eq!(lp.order, 2);
        let want = chain.out_chain[0].eval(t2).unwrap() * chain.in_chain[0].eval(t2).unwrap().adjoint();
        assert!(linalg::dist(lp.coefficient(2).unwrap(), &want) < 1e-6);
    }
}

/// σ₂* = 2 ≠ σ₂ = 1 leaves σ₂*CB̃σ₁ − σ₁*CB̃σ₂ = CB̃ ≠ 0, which D = 0 cannot balance.
#[test]
fn infeasible_linkage_is_reported() {
    let sig = Signature::new(k(1.0), k(1.0), k(0.0), k(1.0), k(2.0), k(0.0)).unwrap();
    let chain = PoleChain::solve(&sig, c(0.0, 0.0), 0.0, &[one()], &[one()]).unwrap();
    match realize_single_pole(&chain, &k(0.0), &sig) {
        Err(VesselError::Linkage { residuals }) => assert!(residuals[2] > 0.1 && residuals[0] == 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn broken_chain_is_rejected() {
    let sig = fixtures::v0_signature(TimeGrid::unit());
    let mut chain = PoleChain::solve(&sig, c(0.0, 0.0), 0.0, &[one()], &[one()]).unwrap();
    chain.out_chain[0] = MatFn::from_fn(TimeGrid::unit(), |t| scalar(c(1.0 + t, 0.0))).unwrap();
    assert!(matches!(realize_single_pole(&chain, &k(1.0), &sig), Err(VesselError::InvalidChain { .. })));
}

fn scalar_triple(z: f64) -> PoleTriple {
    PoleTriple { x: k(1.0), t: scalar(c(z, 0.0)), y: k(1.0) }
}

#[test]
fn mittag_leffler_examples() {
    let sig = fixtures::v0_signature(TimeGrid::unit());
    let v = realize_mittag_leffler(&[scalar_triple(0.0)], &k(1.0), &sig).unwrap();
    for j in 0..10 {
        let lam = Complex64::from_polar(2.0, j as f64);
        let d = linalg::dist(&transfer(&v, lam, 0.5).unwrap(), &transfer(&fixtures::v0(), lam, 0.5).unwrap());
        assert!(d < 1e-10);
    }
    let v = realize_mittag_leffler(&[scalar_triple(0.0), scalar_triple(1.0)], &k(1.0), &sig).unwrap();
    assert!((transfer(&v, c(2.0, 0.0), 0.3).unwrap()[(0, 0)] - c(2.5, 0.0)).norm() < 1e-12);
    for (z, tr) in [(0.0, scalar_triple(0.0)), (1.0, scalar_triple(1.0))] {
        let defect = extract_pole_data(
            |l, t| Ok(transfer(&v, l, t)? - tr.local_part(&sig, l, t)?),
            c(z, 0.0),
            2,
            0.5,
            0.3,
        )
        .unwrap();
        assert!(defect.max_norm() < 1e-7);
    }
}

#[test]
fn perturbed_feedthrough_reports_residual() {
    let sig = fixtures::v0_signature(TimeGrid::unit());
    let eps = 1e-3;
    let d = MatFn::from_fn(TimeGrid::unit(), |t| scalar(c(1.0 + eps * t, 0.0))).unwrap();
    match realize_mittag_leffler(&[scalar_triple(0.0)], &d, &sig) {
        Err(VesselError::Linkage { residuals }) => {
            assert!((residuals[2] - eps).abs() < 1e-9, "{residuals:?}");
            assert!(residuals[0] < 1e-15 && residuals[1] < 1e-15);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn contour_with_trivial_signature_is_constant() {
    let sig = fixtures::v0_signature(TimeGrid::new(0.0, 1.0, 17).unwrap());
    let a1 = from_rows(2, 2, &[c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-0.2, 0.1)]);
    let c0 = from_rows(1, 2, &[c(1.0, 0.0), c(0.5, -0.5)]);
    let b0 = from_rows(2, 1, &[c(0.2, 0.0), c(1.0, 0.0)]);
    let p = propagate_cb(&c0, &b0, &a1, &sig, 0.0, PropagateMethod::Contour).unwrap();
    for m in p.c.samples() {
        assert!(linalg::dist(m, &c0) < 1e-12);
    }
    for m in p.bt.samples() {
        assert!(linalg::dist(m, &b0) < 1e-12);
    }
    assert!(p.error_estimate < 1e-10);
}

#[test]
fn ode_route_reproduces_va() {
    let sig = fixtures::vg_signature(TimeGrid::unit(), 0.0);
    let p = propagate_cb(&one(), &one(), &one(), &sig, 0.0, PropagateMethod::Ode).unwrap();
    let va = fixtures::va(1.0);
    assert!(p.c.max_dist(&va.c) < 1e-9);
    assert!(p.bt.max_dist(&va.bt) < 1e-9);
}

#[test]
fn ode_and_contour_agree() {
    let grid = TimeGrid::new(0.0, 1.0, 33).unwrap();
    let sig = fixtures::vg_signature(grid, 0.0);
    let a1 = from_rows(
        3,
        3,
        &[
            c(0.2, 0.1), c(0.3, 0.0), c(0.0, -0.2),
            c(-0.1, 0.0), c(0.4, -0.3), c(0.1, 0.1),
            c(0.2, 0.2), c(0.0, 0.0), c(-0.5, 0.0),
        ],
    );
    assert!(linalg::eigenvalues(&a1).iter().all(|z| z.norm() <= 1.0));
    let c0 = from_rows(1, 3, &[c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]);
    let b0 = from_rows(3, 1, &[c(0.3, 0.0), c(1.0, -1.0), c(0.0, 0.2)]);
    let ode = propagate_cb(&c0, &b0, &a1, &sig, 0.0, PropagateMethod::Ode).unwrap();
    let ct = propagate_cb(&c0, &b0, &a1, &sig, 0.0, PropagateMethod::Contour).unwrap();
    assert!(ode.c.max_dist(&ct.c) < 1e-6, "{:e}", ode.c.max_dist(&ct.c));
    assert!(ode.bt.max_dist(&ct.bt) < 1e-6, "{:e}", ode.bt.max_dist(&ct.bt));
    assert!(matches!(
        propagate_cb(&c0, &b0, &a1, &sig, 0.0, PropagateMethod::ContourWith { radius: 0.1, nodes: 64 }),
        Err(VesselError::Contour { .. })
    ));
}

#[test]
fn laurent_examples() {
    let v0 = fixtures::v0();
    let lp = extract_pole_data(|l, t| transfer(&v0, l, t), c(0.0, 0.0), 3, 0.5, 0.5).unwrap();
    assert_eq!(lp.order, 1);
    assert!((lp.coefficient(1).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    let vc2 = fixtures::vc2();
    let lp = extract_pole_data(|l, t| transfer(&vc2, l, t), c(0.0, 0.0), 3, 0.5, 0.5).unwrap();
    assert_eq!(lp.order, 2);
    assert!((lp.coefficient(2).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    assert!((lp.coefficient(1).unwrap()[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
    let lp = extract_pole_data(|l, t| transfer(&vc2, l, t), c(5.0, 0.0), 3, 0.5, 1.0).unwrap();
    assert_eq!(lp.order, 0);
    assert!(lp.max_norm() < 1e-10);
    assert!(matches!(
        extract_pole_data(|l, t| transfer(&vc2, l, t), c(0.0, 0.0), 1, 0.5, 0.5),
        Err(VesselError::OrderOverflow { order: 2, .. })
    ));
}

#[test]
fn simple_pole_realizations_are_vessels() {
    let grid = TimeGrid::unit();
    let s2 = MatFn::from_fn(grid, |t| linalg::eye(2) * c(0.5 * t.cos(), 0.0)).unwrap();
    let gamma = MatFn::constant(grid, from_rows(2, 2, &[c(0.1, 0.0), c(0.2, 0.1), c(0.0, -0.1), c(0.0, 0.3)]));
    let gammas = MatFn::constant(grid, from_rows(2, 2, &[c(-0.2, 0.0), c(0.0, 0.1), c(0.3, 0.0), c(0.1, 0.0)]));
    let id = MatFn::identity(grid, 2);
    let sig = Signature::new(id.clone(), s2.clone(), gamma, id, s2, gammas).unwrap();
    let col = |a: f64, b: f64| from_rows(2, 1, &[c(a, 0.0), c(0.0, b)]);
    let poles = [
        SimplePole { z: c(0.5, 0.2), out_seed: col(1.0, 0.5), in_seed: col(0.3, 1.0) },
        SimplePole { z: c(-0.3, -0.6), out_seed: col(0.2, -1.0), in_seed: col(1.0, 0.0) },
    ];
    let d0 = from_rows(2, 2, &[c(1.0, 0.0), c(0.2, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let v = realize_simple_poles(&sig, &poles, &d0, 0.0).unwrap();
    let rep = verify_vessel(&v, DEFAULT_TOL);
    assert!(rep.pass, "{:?}", rep.named());
    assert!(check_intertwining(&v, c(2.5, 1.0), 0.0, 0.7).unwrap() < 1e-6);
}
