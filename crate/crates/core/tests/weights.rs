use carleman_core::fields::{AxisRule, Interval, QuadratureGrid, SpaceTimeDomain};
use carleman_core::jet::JetSpace;
use carleman_core::weights::*;
use carleman_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eta_1d(l: f64) -> (SpaceTimeDomain, EtaField) {
    let d = SpaceTimeDomain::interval(-1.0, 1.0, l).unwrap();
    let e = build_eta(&d, &[Interval::new(0.4 * l, 0.6 * l)], &[Interval::new(0.3 * l, 0.7 * l)]).unwrap();
    (d, e)
}

fn all_families(dim: usize) -> Vec<Family> {
    vec![
        Family::I { k: 1.0 },
        Family::II { s0: 0.2, c: 1.5, x0: vec![-0.5; dim] },
        Family::III { b: 1.0 },
    ]
}

#[test]
fn family_iii_peak_value() {
    let d = SpaceTimeDomain::interval(-2.0, 2.0, 1.0).unwrap();
    let e = build_eta(&d, &[Interval::new(0.4, 0.6)], &[Interval::new(0.3, 0.7)]).unwrap();
    let spec = WeightSpec::family_iii(2.0, 3.0, 1.0).unwrap();
    let w = build_weight(&spec, &e, &d).unwrap();
    let phi = w.phi(&[0.0, 0.5]).unwrap();
    assert!((phi - 5f64.exp()).abs() < 1e-12 * phi);
    assert!((phi - 148.413_159_102_576_6).abs() < 1e-9);
}

#[test]
fn family_i_is_singular_at_the_slab_ends() {
    let (d, e) = eta_1d(1.0);
    let w = build_weight(&WeightSpec::family_i(1.0, 3.0, 2.0).unwrap(), &e, &d).unwrap();
    assert_eq!(w.log_theta(&[-1.0, 0.5]), Err(Error::WeightSingular(-1.0)));
    assert!(w.log_theta(&[1.0, 0.5]).is_err());
    let near = w.log_theta(&[-1.0 + 1e-6, 0.5]).unwrap();
    let mid = w.log_theta(&[0.0, 0.5]).unwrap();
    assert!(near < -1e5 && mid > near);
}

#[test]
fn family_ii_rejects_x0_in_domain() {
    let (d, e) = eta_1d(1.0);
    let spec = WeightSpec::new(Family::II { s0: 0.0, c: 1.0, x0: vec![0.5] }, 3.0, 2.0).unwrap();
    assert!(matches!(build_weight(&spec, &e, &d), Err(Error::InvalidWeight(_))));
    let spec = WeightSpec::new(Family::II { s0: 0.0, c: 1.0, x0: vec![1.0] }, 3.0, 2.0).unwrap();
    assert!(build_weight(&spec, &e, &d).is_err());
}

#[test]
fn trivial_weight_is_one() {
    let (d, e) = eta_1d(1.0);
    let w = build_weight(&WeightSpec::family_iii(1.0, 0.0, 2.0).unwrap(), &e, &d).unwrap();
    let p = w.point(&[0.3, 0.2]).unwrap();
    assert_eq!(p.log_theta, 0.0);
    assert_eq!(p.a, 0.0);
    assert_eq!(p.bilap_ell, 0.0);
}

#[test]
fn gradient_identity_on_random_points() {
    for dim in [1usize, 2] {
        let lengths = vec![1.0; dim];
        let d = SpaceTimeDomain::new(-1.0, 1.0, &lengths).unwrap();
        let w0 = vec![Interval::new(0.45, 0.55); dim];
        let ww = vec![Interval::new(0.4, 0.6); dim];
        let e = build_eta(&d, &w0, &ww).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fam in all_families(dim) {
            let spec = WeightSpec::new(fam, 4.0, 2.0).unwrap();
            let w = build_weight(&spec, &e, &d).unwrap();
            let sp = JetSpace::new(dim + 1, 2);
            for _ in 0..1000 {
                let mut p = vec![rng.random_range(-0.95..0.95)];
                p.extend((0..dim).map(|_| rng.random_range(0.0..1.0)));
                let j = w.jets(&sp, &p).unwrap();
                let pt = w.point(&p).unwrap();
                let lmf = 4.0 * 2.0 * pt.phi;
                let scale = lmf * (1.0 + pt.grad_eta.iter().map(|g| g.abs()).sum::<f64>() * 2.0);
                for i in 0..dim {
                    let r = pt.grad_ell[i] - lmf * pt.grad_eta[i];
                    assert!(r.abs() <= 1e-10 * scale, "{r}");
                    for k in 0..dim {
                        let rhs = lmf * 2.0 * pt.grad_eta[i] * pt.grad_eta[k] + lmf * pt.hess_eta[i][k];
                        let r = pt.hess_ell[i][k] - rhs;
                        let sc = scale + lmf * pt.hess_eta[i][k].abs() * 4.0;
                        assert!(r.abs() <= 1e-10 * sc, "{r}");
                    }
                }
                assert!(pt.a >= 0.0);
                assert!(pt.log_theta <= 0.0);
                assert!(j.phi.value() > 0.0);
            }
        }
    }
}

#[test]
fn condition_report_family_iii_and_i() {
    let (d, e) = eta_1d(1.0);
    let grid = QuadratureGrid::from_axes(vec![
        AxisRule::uniform(-1.0, 1.0, 16, 6).unwrap(),
        AxisRule::uniform(0.0, 1.0, 16, 6).unwrap(),
    ]);
    let w3 = build_weight(&WeightSpec::family_iii(1.0, 3.0, 2.0).unwrap(), &e, &d).unwrap();
    let r = check_condition_1_1(&w3, &grid);
    assert!(r.pass && r.max_residual_gradient <= 1e-12, "{r:?}");
    assert!(r.fitted_c.is_finite() && r.fitted_c > 0.0);

    let grid_i = QuadratureGrid::from_axes(vec![
        AxisRule::uniform(-1.0, 1.0, 16, 6).unwrap().without_end_panels().unwrap(),
        AxisRule::uniform(0.0, 1.0, 16, 6).unwrap(),
    ]);
    let w1 = build_weight(&WeightSpec::family_i(1.0, 3.0, 2.0).unwrap(), &e, &d).unwrap();
    let r = check_condition_1_1(&w1, &grid_i);
    assert!(r.pass && r.fitted_c.is_finite(), "{r:?}");
}

#[test]
fn fitted_c_matches_grid_maximization() {
    // family III, μ = 1, b = 2: φ_s = −2μsφ, φ_ss = (4μ²s² − 2μ)φ
    let d = SpaceTimeDomain::interval(-2.0, 2.0, 1.0).unwrap();
    let e = build_eta(&d, &[Interval::new(0.4, 0.6)], &[Interval::new(0.3, 0.7)]).unwrap();
    let w = build_weight(&WeightSpec::family_iii(2.0, 3.0, 1.0).unwrap(), &e, &d).unwrap();
    let grid = QuadratureGrid::from_axes(vec![
        AxisRule::uniform(-2.0, 2.0, 10, 4).unwrap(),
        AxisRule::uniform(0.0, 1.0, 6, 4).unwrap(),
    ]);
    let r = check_condition_1_1(&w, &grid);
    let mut c = 0.0f64;
    for i in 0..grid.node_count() {
        let p = grid.node(i);
        let phi = (1.0 * (e.value(&p[1..]) / e.max() + 4.0 - p[0] * p[0])).exp();
        let a = (2.0 * p[0] * phi).abs() / phi.powi(3);
        let b = ((4.0 * p[0] * p[0] - 2.0) * phi).abs() / phi.powi(5);
        c = c.max(a).max(b);
    }
    assert!((r.fitted_c - c).abs() <= 1e-12 * c, "{} vs {c}", r.fitted_c);
}

#[test]
fn family_iii_slab_bounds() {
    for mu in [2.0f64, 4.0] {
        let (b, b0) = family_iii_slab(mu);
        assert!(b0 > 1.0 && b > b0);
        let d = SpaceTimeDomain::interval(-b, b, 1.0).unwrap();
        let e = build_eta(&d, &[Interval::new(0.4, 0.6)], &[Interval::new(0.3, 0.7)]).unwrap();
        let w = build_weight(&WeightSpec::family_iii(b, 3.0, mu).unwrap(), &e, &d).unwrap();
        let n = 400;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..=n {
            let x = i as f64 / n as f64;
            for j in 0..=n {
                let s = -1.0 + 2.0 * j as f64 / n as f64;
                lo = lo.min(w.phi(&[s, x]).unwrap());
                let t = b0 + (b - b0) * j as f64 / n as f64;
                hi = hi.max(w.phi(&[t, x]).unwrap()).max(w.phi(&[-t, x]).unwrap());
            }
        }
        let tol = 1e-12 * mu.exp();
        assert!(lo >= 2.0 + mu.exp() - tol, "{lo}");
        assert!(hi <= 1.0 + mu.exp() + tol, "{hi}");
        assert!((lo - 2.0 - mu.exp()).abs() < tol && (hi - 1.0 - mu.exp()).abs() < tol);
    }
}

#[test]
fn rect_path_matches_jets() {
    let (d, e) = eta_1d(1.0);
    for fam in all_families(1) {
        let w = build_weight(&WeightSpec::new(fam, 5.0, 2.0).unwrap(), &e, &d).unwrap();
        let sp = JetSpace::new(2, 6);
        let p = [0.3, 0.27];
        let j = w.jets(&sp, &p).unwrap();
        let t = w.t_series(p[0], 7).unwrap();
        let (xi, _) = w.x_series_1d(p[1], 7);
        let (ell, lt) = w.rect_1d(&t, &xi);
        for a in 0..3 {
            for b in 0..5 {
                let r = j.ell.partial(&[a, b]);
                assert!((ell.partial(a, b) - r).abs() <= 1e-11 * (1.0 + r.abs()));
            }
        }
        assert!((lt.value() - j.log_theta.value()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rescaling_theta_only_moves_log_theta(shift in -50.0f64..50.0, s in -0.9f64..0.9, x in 0.01f64..0.99) {
        let (d, e) = eta_1d(1.0);
        let w = build_weight(&WeightSpec::family_iii(1.0, 6.0, 2.0).unwrap(), &e, &d).unwrap();
        let w2 = w.with_log_theta_max(w.ell_max + shift);
        let a = w.point(&[s, x]).unwrap();
        let b = w2.point(&[s, x]).unwrap();
        prop_assert_eq!(&a.grad_ell, &b.grad_ell);
        prop_assert_eq!(&a.hess_ell, &b.hess_ell);
        prop_assert_eq!(a.a, b.a);
        prop_assert_eq!(a.cap_lambda, b.cap_lambda);
        prop_assert!(((a.log_theta - b.log_theta) - shift).abs() < 1e-9 * (1.0 + a.log_theta.abs()));
    }

    #[test]
    fn scaled_theta_in_unit_interval(lambda in 2.0f64..40.0, mu in 1.0f64..4.0, s in -0.99f64..0.99, x in 0.0f64..1.0, fam in 0usize..3) {
        let (d, e) = eta_1d(1.0);
        let w = build_weight(&WeightSpec::new(all_families(1)[fam].clone(), lambda, mu).unwrap(), &e, &d).unwrap();
        let lt = w.log_theta(&[s, x]).unwrap();
        prop_assert!(lt <= 0.0);
    }
}
