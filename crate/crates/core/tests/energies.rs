use carleman_core::conjugation::OperatorParams;
use carleman_core::energies::*;
use carleman_core::fields::*;
use carleman_core::jet::JetSpace;
use carleman_core::weights::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn domain() -> SpaceTimeDomain {
    SpaceTimeDomain::interval(-1.0, 1.0, 1.0).unwrap()
}

fn weight(fam: Family, lambda: f64, mu: f64) -> WeightField {
    let d = domain();
    let e = build_eta(&d, &[Interval::new(0.45, 0.55)], &[Interval::new(0.4, 0.6)]).unwrap();
    build_weight(&WeightSpec::new(fam, lambda, mu).unwrap(), &e, &d).unwrap()
}

fn field(seed: u64, bc: SpatialBc) -> TestField {
    random_test_field(Seed(seed), bc, TemporalCondition::None, &domain())
}

fn params(a: f64, b: f64) -> OperatorParams {
    OperatorParams::new(a, b).unwrap()
}

fn fam3() -> Family {
    Family::III { b: 1.0 }
}

fn fluxes(w: &WeightField, p: &OperatorParams, z: &TestField, pt: &[f64]) -> BoundaryFluxes {
    let sp = JetSpace::new(2, 5);
    fluxes_from_ctx(&Ctx::from_z(&sp, w, p, z, pt).unwrap())
}

#[test]
fn low_order_examples() {
    let w = weight(fam3(), 3.0, 2.0);
    let p = params(1.0, -1.0);
    let e = low_order_terms(&w, &p, &TestField::zero(1), &[0.2, 0.3]).unwrap();
    assert_eq!(e, LowOrderEnergies::default());
    let e = low_order_terms(&w, &params(1.0, 0.0), &field(3, SpatialBc::None), &[0.2, 0.3]).unwrap();
    assert_eq!(e.a3, 0.0);
    // z = s: only z_s survives
    let z = TestField::single(
        1.0,
        Factor(vec![Primitive::Poly { coeffs: vec![0.0, 1.0] }]),
        vec![Factor::one()],
    );
    let pt = [0.2, 0.3];
    let e = low_order_terms(&w, &p, &z, &pt).unwrap();
    let phi = w.phi(&pt).unwrap();
    let expect = 9.0 * 8.0 * phi * phi;
    assert!((e.a3 - expect).abs() <= 1e-13 * expect);
    assert_eq!(e.a2, 0.0);
    assert_eq!(e.a4, 0.0);
}

#[test]
fn h2_vanishes_and_h1_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sp = JetSpace::new(2, 4);
    for fam in [fam3(), Family::I { k: 1.0 }] {
        let w = weight(fam, 3.0, 2.0);
        let p = params(0.5, -1.0);
        for f in 0..20 {
            let z = field(200 + f, SpatialBc::None);
            let pt = [rng.random_range(-0.9..0.9), rng.random_range(0.02..0.98)];
            let b = bh_terms(&w, &p, &z, &pt).unwrap();
            let c = Ctx::from_z(&sp, &w, &p, &z, &pt).unwrap();
            let (lam, mu) = (3.0, 2.0);
            let phi = c.phi.value();
            let e1 = c.eta.d(1).value();
            let e2 = c.eta.dn(1, 2).value();
            let z1 = c.z.d(1).value();
            let z3 = c.z.dn(1, 3).value();
            let a = c.l.d(1).value().powi(2);
            let h2_scale = 8.0 * lam * mu * a * a * phi * e2.abs() * z1 * z1;
            assert!(b.h[1].abs() <= 1e-12 * h2_scale.max(1e-300), "{} {}", b.h[1], h2_scale);
            let h1 = 8.0 * lam * mu * mu * phi * e1 * e1 * z3 * z3;
            let scale = 8.0 * lam * mu * phi * (e2.abs() + mu * e1 * e1) * z3 * z3;
            assert!((b.h[0] - h1).abs() <= 1e-12 * scale, "{} {}", b.h[0], h1);
            assert!(b.a5.is_none());
        }
    }
}

#[test]
fn trivial_weight_budget_and_boundary_a5() {
    let w = weight(fam3(), 0.0, 2.0);
    let p = params(1.0, -1.0);
    let z = field(7, SpatialBc::None);
    let b = bh_terms(&w, &p, &z, &[0.1, 0.4]).unwrap();
    assert_eq!(b.b[0], 0.0);
    assert_eq!(b.b[2], 0.0);
    assert_eq!(b.b[1], 0.0);
    let w = weight(fam3(), 3.0, 2.0);
    let b = bh_terms(&w, &p, &z, &[0.1, 0.0]).unwrap();
    assert!(b.a5.unwrap() >= 0.0);
    assert!(bh_terms(&w, &p, &z, &[0.1, 1.0]).unwrap().a5.is_some());
}

#[test]
fn flux_parameter_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = weight(fam3(), 3.0, 2.0);
    for f in 0..10 {
        let z = field(300 + f, SpatialBc::None);
        let pt = [rng.random_range(-0.9..0.9), rng.random_range(0.02..0.98)];
        let f0 = fluxes(&w, &params(0.0, 0.0), &z, &pt);
        assert_eq!(f0.m_total(), 0.0);
        for side in [Side::Lower, Side::Upper] {
            assert_eq!(boundary_flux(&w, &params(0.0, 0.0), &z, FluxFace::Time(side), &pt).unwrap(), 0.0);
        }
        let fa = fluxes(&w, &params(0.0, -1.0), &z, &pt);
        assert_eq!(fa.m[0], 0.0);
        assert_eq!(fa.v[0], 0.0);
        let fb = fluxes(&w, &params(1.0, 0.0), &z, &pt);
        assert_eq!(fb.m[1], 0.0);
        assert_eq!(fb.m[2], 0.0);
        assert_eq!(fb.v[1], 0.0);
        assert_eq!(fb.v[2], 0.0);
    }
}

#[test]
fn clamped_fields_kill_the_first_three_fluxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = weight(fam3(), 3.0, 2.0);
    let p = params(1.0, -1.0);
    for f in 0..10 {
        let v = field(400 + f, SpatialBc::Clamped);
        let z = v.clone();
        for x in [0.0, 1.0] {
            let pt = [rng.random_range(-0.9..0.9), x];
            let fl = fluxes(&w, &p, &z, &pt);
            let scale: f64 = fl.v.iter().map(|x| x.abs()).sum::<f64>() + 1.0;
            for j in 0..3 {
                assert!(fl.v[j].abs() <= 1e-12 * scale, "V{} = {}", j + 1, fl.v[j]);
            }
        }
    }
}

fn subbox_check(w: &WeightField, p: &OperatorParams, z: &TestField, s: (f64, f64), x: (f64, f64), panels: usize) -> f64 {
    let grid = QuadratureGrid::from_axes(vec![
        AxisRule::uniform(s.0, s.1, panels, 8).unwrap(),
        AxisRule::uniform(x.0, x.1, panels, 8).unwrap(),
    ]);
    let interior = grid.integrate_many(12, |pt, out| {
        let d = flux_divergence(w, p, z, pt).unwrap();
        out[..3].copy_from_slice(&d.ds_m);
        out[3..].copy_from_slice(&d.dx_v);
    });
    let mut worst = 0.0f64;
    for j in 0..12 {
        let (rule, lo, hi) = if j < 3 { (&grid.axes[1], s.0, s.1) } else { (&grid.axes[0], x.0, x.1) };
        let mut face = 0.0;
        let mut mag = 0.0;
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let (a, b) = if j < 3 { ([hi, t], [lo, t]) } else { ([t, hi], [t, lo]) };
            let (fa, fb) = (fluxes(w, p, z, &a), fluxes(w, p, z, &b));
            let (ua, ub) = if j < 3 { (fa.m[j], fb.m[j]) } else { (fa.v[j - 3], fb.v[j - 3]) };
            face += wt * (ua - ub);
            mag += wt * (ua.abs() + ub.abs());
        }
        let rel = (face - interior[j]).abs() / (mag + interior[j].abs()).max(1e-300);
        if mag > 0.0 {
            worst = worst.max(rel);
        }
    }
    worst
}

#[test]
fn divergence_theorem_on_interior_boxes() {
    let p = params(0.8, -1.0);
    for (fam, seed) in [(fam3(), 500), (Family::I { k: 1.0 }, 510)] {
        let w = weight(fam, 2.0, 2.0);
        for f in 0..3 {
            let z = field(seed + f, SpatialBc::None);
            let coarse = subbox_check(&w, &p, &z, (-0.6, 0.5), (0.15, 0.8), 2);
            let fine = subbox_check(&w, &p, &z, (-0.6, 0.5), (0.15, 0.8), 4);
            println!("coarse {coarse:.2e} fine {fine:.2e}");
            assert!(fine <= 1e-6, "{fine}");
        }
    }
}

fn budget_grid() -> QuadratureGrid {
    make_grid(&domain(), &[8, 8], 8).unwrap()
}

#[test]
fn pointwise_budget_zero_and_compact_support() {
    let w = weight(fam3(), 4.0, 2.0);
    let p = params(1.0, -1.0);
    let g = budget_grid();
    let r = pointwise_budget(&w, &p, &TestField::zero(1), &g).unwrap();
    for t in r.lhs_scaled.iter().chain(&r.lhs_fixed).chain(&r.rhs) {
        assert_eq!(t.value, 0.0, "{}", t.name);
    }
    let d = domain();
    let v = windowed_test_field(Seed(3), Interval::new(-0.8, 0.8), &[Interval::new(0.1, 0.9)], 5, &d);
    let r = pointwise_budget(&w, &p, &v, &g).unwrap();
    let flux: Vec<f64> = r.lhs_fixed.iter().filter(|t| t.name == "ds_m" || t.name == "div_v").map(|t| t.value).collect();
    assert_eq!(flux.len(), 2);
    let scale = r.lhs_fixed_total().abs() + r.rhs_total();
    for f in flux {
        assert!(f.abs() <= 1e-12 * scale, "{f}");
    }
}

#[test]
fn pointwise_budget_constant_is_stable_under_lambda_doubling() {
    let p = params(1.0, -1.0);
    let g = budget_grid();
    let v = field(21, SpatialBc::Clamped);
    let r0 = pointwise_budget(&weight(fam3(), 4.0, 2.0), &p, &v, &g).unwrap();
    let r1 = pointwise_budget(&weight(fam3(), 8.0, 2.0), &p, &v, &g).unwrap();
    assert!(r0.c_emp > 0.0 && r1.c_emp > 0.0);
    let lhs1 = r1.lhs_scaled_total() + r1.lhs_fixed_total();
    assert!(lhs1 <= r0.big_c_emp.max(1e-300) * 1.01 * r1.rhs_total() || lhs1 <= 0.0);
    let (c, big) = fit_constants(&[r0, r1]);
    assert!(c > 0.0 && big >= 0.0);
}

#[test]
fn lemma_suites_hold_with_stable_constants() {
    let p = params(1.0, -1.0);
    let g = budget_grid();
    for f in 0..3 {
        let v = field(40 + f, SpatialBc::Clamped);
        let mut prev: Option<(f64, f64)> = None;
        for lam in [4.0, 8.0] {
            let w = weight(fam3(), lam, 2.0);
            let a = lemma_2_1(&w, &p, &v, &g).unwrap();
            let b = lemma_2_4(&w, &v, &g).unwrap();
            assert!(a.low_order > 0.0 && b.resid > 0.0);
            assert!(a.c_fit.is_finite() && b.c_fit.is_finite());
            let lhs = a.p4p1 + 0.25 * a.p1_sq + a.c_fit * a.low_order;
            assert!(lhs >= -1e-12 * (a.p4p1.abs() + a.p1_sq));
            if let Some((c21, c24)) = prev {
                assert!(a.c_fit <= 1.2 * c21 + 1e-12);
                assert!(b.c_fit <= 1.2 * c24 + 1e-12);
            }
            prev = Some((a.c_fit, b.c_fit));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn low_order_energies_are_nonnegative(seed in 0u64..10_000, s in -0.95f64..0.95, x in 0.0f64..1.0, lam in 0.0f64..10.0, beta in -2.0f64..2.0) {
        let lam = if lam < 1.0 { 0.0 } else { lam };
        let w = weight(fam3(), lam, 2.0);
        let e = low_order_terms(&w, &params(1.0, beta), &field(seed, SpatialBc::None), &[s, x]).unwrap();
        prop_assert!(e.a1 >= 0.0 && e.a2 >= 0.0 && e.a3 >= 0.0 && e.a4 >= 0.0);
    }
}
