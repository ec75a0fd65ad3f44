use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vessel_core::numgrid::linalg::{self, c, CMat};
use vessel_core::numgrid::{MatFn, TimeGrid};
use vessel_core::population::{
    factorable_vessel, random_cascade_pair, random_matrix, random_pole, random_signature, random_vessel,
};
use vessel_core::realize::{extract_pole_data, realize_single_pole, solve_feedthrough, PoleChain};
use vessel_core::simulate2d::two_path_consistency;
use vessel_core::structure::{
    controllable_subspace, global_controllable_subspace, global_unobservable_subspace, kalman_decompose,
    unobservable_subspace,
};
use vessel_core::vesselcore::{check_intertwining, transfer, verify_vessel, DiffVessel, DEFAULT_TOL};
use vessel_core::vesselops::{
    adjoint, adjoint_relation_check, cascade, compress, decompose, gauge_transform, invert, project_with,
    FeedthroughSplit,
};
use vessel_core::Complex64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid() -> TimeGrid {
    TimeGrid::new(0.0, 1.0, 65).unwrap()
}

fn vessel(seed: u64, poles: usize) -> DiffVessel {
    let mut r = rng(seed);
    let sig = random_signature(&mut r, grid(), 2);
    random_vessel(&mut r, &sig, poles).unwrap()
}

/// λ on a circle of radius 2(‖A₁‖+1) and beyond.
fn far_lambdas(v: &DiffVessel, count: usize) -> Vec<Complex64> {
    let r0 = 2.0 * (v.a1.max_norm() + 1.0);
    (0..count).map(|k| Complex64::from_polar(r0 * (1.0 + 0.1 * (k % 3) as f64), 0.7 + 1.3 * k as f64)).collect()
}

fn t2s() -> [f64; 5] {
    [0.0, 0.25, 0.5, 0.75, 1.0]
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn expm_inverts_its_negative(seed in any::<u64>(), scale in 0.01f64..20.0) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, 4, 4, 1.0) * c(scale, 0.0);
        let p = linalg::expm(&a) * linalg::expm(&(-a.clone()));
        let cond = linalg::condition(&linalg::expm(&a));
        prop_assert!(linalg::dist(&p, &linalg::eye(4)) < 1e-12 * cond.max(1.0) * 10.0);
    }

    #[test]
    fn interpolation_is_node_exact(seed in any::<u64>(), points in 5usize..60) {
        let mut r = rng(seed);
        let g = TimeGrid::new(-0.3, 0.8, points).unwrap();
        let samples: Vec<CMat> = (0..points).map(|_| random_matrix(&mut r, 2, 3, 1.0)).collect();
        let f = MatFn::from_samples(g, samples.clone()).unwrap();
        for (k, s) in samples.iter().enumerate() {
            prop_assert_eq!(&f.eval(g.node(k)).unwrap(), s);
        }
    }

    #[test]
    fn spline_reproduces_cubics(a in -2.0f64..2.0, b in -2.0f64..2.0, cc in -2.0f64..2.0, t in 0.0f64..1.0) {
        let f = MatFn::from_fn(grid(), |x| linalg::scalar(c(a * x * x * x + b * x * x + cc, 0.0))).unwrap();
        let want = a * t * t * t + b * t * t + cc;
        let dwant = 3.0 * a * t * t + 2.0 * b * t;
        prop_assert!((f.eval(t).unwrap()[(0, 0)].re - want).abs() < 1e-11);
        prop_assert!((f.eval_derivative(t).unwrap()[(0, 0)].re - dwant).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn realized_vessels_are_consistent(seed in any::<u64>()) {
        let v = vessel(seed, 3);
        let rep = verify_vessel(&v, DEFAULT_TOL);
        prop_assert!(rep.pass, "{:?}", rep.named());
        for lam in far_lambdas(&v, 3) {
            prop_assert!(check_intertwining(&v, lam, 0.0, 0.6).unwrap() < 1e-6);
        }
    }

    #[test]
    fn cascade_is_multiplicative(seed in any::<u64>()) {
        let (v1, v2) = random_cascade_pair(&mut rng(seed), grid(), 2, 2).unwrap();
        let v = cascade(&v1, &v2).unwrap();
        prop_assert!(verify_vessel(&v, 10.0 * DEFAULT_TOL).pass);
        for lam in far_lambdas(&v, 20) {
            for t in t2s() {
                let want = transfer(&v2, lam, t).unwrap() * transfer(&v1, lam, t).unwrap();
                prop_assert!(linalg::dist(&transfer(&v, lam, t).unwrap(), &want) < 1e-8);
            }
        }
    }

    #[test]
    fn inverse_is_reciprocal(seed in any::<u64>()) {
        let v = vessel(seed, 3);
        let vi = invert(&v).unwrap();
        prop_assert!(verify_vessel(&vi, 10.0 * DEFAULT_TOL).pass);
        let r = 2.0 * (v.a1.max_norm() + vi.a1.max_norm() + 1.0);
        for k in 0..20 {
            let lam = Complex64::from_polar(r, 0.3 * k as f64);
            for t in t2s() {
                let p = transfer(&vi, lam, t).unwrap() * transfer(&v, lam, t).unwrap();
                prop_assert!(linalg::dist(&p, &linalg::eye(2)) < 1e-8);
            }
        }
    }

    #[test]
    fn adjoint_relation_holds(seed in any::<u64>()) {
        let v = vessel(seed, 3);
        let a = adjoint(&v).unwrap();
        prop_assert!(verify_vessel(&a, 10.0 * DEFAULT_TOL).pass);
        for lam in far_lambdas(&v, 20) {
            for t in t2s() {
                prop_assert!(adjoint_relation_check(&v, &a, lam, t).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn gauge_preserves_transfer(seed in any::<u64>(), w in 0.0f64..2.0) {
        let v = vessel(seed, 2);
        let n = v.state_dim();
        let base = linalg::eye(n) + random_matrix(&mut rng(seed ^ 1), n, n, 0.5);
        let tm = MatFn::from_fn(*v.grid(), |t| &base * c((w * t).cos(), (w * t).sin())).unwrap();
        let g = gauge_transform(&v, &tm).unwrap();
        prop_assert!(verify_vessel(&g, 10.0 * DEFAULT_TOL).pass);
        for lam in far_lambdas(&v, 20) {
            for t in t2s() {
                prop_assert!(linalg::dist(&transfer(&g, lam, t).unwrap(), &transfer(&v, lam, t).unwrap()) < 1e-8);
            }
        }
    }

    #[test]
    fn kalman_minimal_part_keeps_transfer(seed in any::<u64>()) {
        let v = vessel(seed, 3);
        let k = kalman_decompose(&v, 0.5).unwrap();
        prop_assert!(k.triangularity_defect() < 1e-8);
        for lam in far_lambdas(&v, 20) {
            prop_assert!(linalg::dist(&transfer(&k.minimal, lam, 0.5).unwrap(), &transfer(&v, lam, 0.5).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn local_and_global_subspaces_agree(seed in any::<u64>()) {
        let v = vessel(seed, 3);
        let mut dims = Vec::new();
        for t in t2s() {
            let (l, g) = (controllable_subspace(&v, t).unwrap(), global_controllable_subspace(&v, t, 5).unwrap());
            prop_assert_eq!(l.ncols(), g.ncols());
            prop_assert!(linalg::max_principal_angle(&l, &g) < 1e-6);
            dims.push(g.ncols());
            let (l, g) = (unobservable_subspace(&v, t).unwrap(), global_unobservable_subspace(&v, t, 5).unwrap());
            prop_assert_eq!(l.ncols(), g.ncols());
            prop_assert!(linalg::max_principal_angle(&l, &g) < 1e-6);
        }
        prop_assert!(dims.iter().all(|&d| d == dims[0]));
    }

    #[test]
    fn leading_laurent_coefficient_matches_chain(seed in any::<u64>(), order in 1usize..4) {
        let mut r = rng(seed);
        let sig = random_signature(&mut r, grid(), 2);
        let z = random_pole(&mut r);
        let seeds_out: Vec<CMat> = (0..order).map(|_| random_matrix(&mut r, 2, 1, 1.0) + CMat::from_element(2, 1, c(0.2, 0.0))).collect();
        let seeds_in: Vec<CMat> = (0..order).map(|_| random_matrix(&mut r, 2, 1, 1.0) + CMat::from_element(2, 1, c(0.0, 0.2))).collect();
        let chain = PoleChain::solve(&sig, z, 0.0, &seeds_out, &seeds_in).unwrap();
        let tr = chain.to_triple().unwrap();
        let d = solve_feedthrough(&sig, &tr.x.mul(&tr.y), &linalg::eye(2), 0.0).unwrap();
        let v = realize_single_pole(&chain, &d, &sig).unwrap();
        prop_assert!(verify_vessel(&v, DEFAULT_TOL).pass);
        for t in [0.0, 0.5, 1.0] {
            let lp = extract_pole_data(|l, s| transfer(&v, l, s), z, order + 1, t, 0.5).unwrap();
            let want = chain.out_chain[0].eval(t).unwrap() * chain.in_chain[0].eval(t).unwrap().adjoint();
            prop_assert!(linalg::dist(lp.coefficient(order).unwrap(), &want) < 1e-6);
        }
    }

    #[test]
    fn factorization_reproduces_transfer(seed in any::<u64>()) {
        let (v, g, gx) = factorable_vessel(&mut rng(seed), grid(), 2).unwrap();
        let split = FeedthroughSplit::first_takes_all(&v);
        let first = compress(&v, &gx, None).unwrap();
        let second = project_with(&v, &g, &split).unwrap();
        let (df, ds) = decompose(&v, &g, &gx, None).unwrap();
        for f in [&first, &second, &df, &ds] {
            prop_assert!(verify_vessel(f, 10.0 * DEFAULT_TOL).pass);
        }
        let back = cascade(&first, &second).unwrap();
        let back2 = cascade(&df, &ds).unwrap();
        for lam in far_lambdas(&v, 20) {
            let want = transfer(&v, lam, 0.5).unwrap();
            prop_assert!(linalg::dist(&transfer(&back, lam, 0.5).unwrap(), &want) < 1e-7);
            prop_assert!(linalg::dist(&transfer(&back2, lam, 0.5).unwrap(), &want) < 1e-7);
        }
    }

    #[test]
    fn two_paths_agree_when_lax_holds(seed in any::<u64>(), t1 in 0.0f64..2.0) {
        let v = vessel(seed, 3);
        prop_assert!(verify_vessel(&v, 1e-8).lax < 1e-8);
        let x0 = random_matrix(&mut rng(seed ^ 7), v.state_dim(), 1, 1.0);
        prop_assert!(two_path_consistency(&v, &x0, (0.0, 0.1), (t1, 0.9)).unwrap() < 1e-8);
    }
}
