use super::*;
use crate::fixtures;
use crate::numgrid::linalg::{self, c, scalar};
use crate::numgrid::{MatFn, TimeGrid};
use crate::VesselError;

#[test]
fn fixtures_satisfy_axioms() {
    assert!(verify_vessel(&fixtures::v0(), 1e-12).max_over_grid < 1e-12);
    let va = verify_vessel(&fixtures::va(1.0), 1e-8);
    assert!(va.pass, "{:?}", va.named());
    for (name, v) in fixtures::all() {
        let r = verify_vessel(&v, DEFAULT_TOL);
        assert!(r.max_over_grid < 1e-8, "{name}: {:?}", r.named());
    }
}

#[test]
fn broken_input_axiom_is_reported() {
    let mut v = fixtures::v0();
    v.bt = MatFn::from_fn(*v.grid(), |t| scalar(c(t, 0.0))).unwrap();
    let r = verify_vessel(&v, DEFAULT_TOL);
    assert!((r.input_cond - 1.0).abs() < 1e-10, "{}", r.input_cond);
    assert!(!r.pass);
}

#[test]
fn transfer_closed_forms() {
    let s = transfer(&fixtures::v0(), c(2.0, 0.0), 0.3).unwrap();
    assert!((s[(0, 0)] - c(1.5, 0.0)).norm() < 1e-15);
    let s = transfer(&fixtures::vg(1.0), c(1.0, 0.0), 2f64.ln()).unwrap();
    assert!((s[(0, 0)] - c(4.0, 0.0)).norm() < 1e-8);
    let s = transfer(&fixtures::vc2(), c(1.0, 0.0), 0.5).unwrap();
    assert!((s[(0, 0)] - c(4.0, 0.0)).norm() < 1e-14);
    let far = transfer(&fixtures::va(1.0), c(1e6, 0.0), 0.5).unwrap();
    assert!((far[(0, 0)] - c(1.0, 0.0)).norm() < 2e-6);
}

#[test]
fn transfer_refuses_spectrum() {
    match transfer(&fixtures::v0(), c(0.0, 0.0), 0.5) {
        Err(VesselError::Resolvent { distance, .. }) => assert_eq!(distance, 0.0),
        other => panic!("{other:?}"),
    }
    assert!(transfer(&fixtures::va(1.0), c(1.0, 0.0), 0.5).is_err());
}

#[test]
fn resolvent_identity() {
    let v = fixtures::vc2();
    let lam = c(0.7, 1.3);
    let x = resolvent_state(&v, lam, 0.4).unwrap();
    let a1 = v.a1.eval(0.4).unwrap();
    let lhs = (linalg::eye(2) * lam - a1) * x;
    assert!(linalg::dist(&lhs, &(v.bt.eval(0.4).unwrap() * v.sig.sigma1.eval(0.4).unwrap())) < 1e-10);
}

#[test]
fn transfer_ode_residuals() {
    assert!(transfer_ode_residual(&fixtures::v0(), c(3.0, 0.0), 0.5).unwrap() < 1e-9);
    assert!(transfer_ode_residual(&fixtures::vg(1.0), c(2.0, 0.0), 0.5).unwrap() < 1e-6);
    let mut v = fixtures::v0();
    v.d = MatFn::from_fn(*v.grid(), |t| scalar(c(1.0 + 0.1 * t, 0.0))).unwrap();
    let r = transfer_ode_residual(&v, c(3.0, 0.0), 0.5).unwrap();
    assert!((r - 0.1).abs() < 1e-9, "{r}");
    assert!(transfer_ode_residual(&fixtures::v0(), c(3.0, 0.0), 0.0).is_err());
}

#[test]
fn intertwining_on_fixtures() {
    assert!(check_intertwining(&fixtures::va(1.0), c(3.0, 0.0), 0.0, 1.0).unwrap() < 1e-7);
    assert!(check_intertwining(&fixtures::vg(1.0), c(2.0, 0.0), 0.0, 0.8).unwrap() < 1e-7);
    assert!(check_intertwining(&fixtures::vc2(), c(2.0, 1.0), 0.3, 0.3).unwrap() < 1e-12);
}

#[test]
fn class_i_membership() {
    let v0 = fixtures::v0();
    let rep = class_i_check(|l, t| transfer(&v0, l, t), &v0.sig, 1.0, 1e-6).unwrap();
    assert!(rep.pass(), "{rep:?}");

    let conj = class_i_check(|l: num_complex::Complex64, _| Ok(scalar(l.conj())), &v0.sig, 1.0, 1e-6).unwrap();
    assert!(!conj.analytic());

    let vg = fixtures::vg(1.0);
    let wrong = class_i_check(|l, t| transfer(&vg, l, t), &v0.sig, 1.0, 1e-6).unwrap();
    assert!(wrong.analytic() && wrong.continuous());
    assert!(!wrong.intertwines(), "{wrong:?}");
    let right = class_i_check(|l, t| transfer(&vg, l, t), &vg.sig, 1.0, 1e-6).unwrap();
    assert!(right.pass(), "{right:?}");
}

#[test]
fn shape_errors_name_the_block() {
    let v = fixtures::v0();
    let g = TimeGrid::unit();
    let err = DiffVessel::new(MatFn::zeros(g, 2, 2), v.a2.clone(), v.bt, v.c, v.d, v.dt, v.sig).unwrap_err();
    match err {
        VesselError::Shape { what, .. } => assert_eq!(what, "A2"),
        other => panic!("{other:?}"),
    }
}
