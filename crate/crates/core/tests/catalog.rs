use carleman_core::conjugation::OperatorParams;
use carleman_core::energies::*;
use carleman_core::fields::*;
use carleman_core::weights::*;
use carleman_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weight(fam: Family, lambda: f64, mu: f64) -> WeightField {
    let d = SpaceTimeDomain::interval(-1.0, 1.0, 1.0).unwrap();
    let e = build_eta(&d, &[Interval::new(0.45, 0.55)], &[Interval::new(0.4, 0.6)]).unwrap();
    build_weight(&WeightSpec::new(fam, lambda, mu).unwrap(), &e, &d).unwrap()
}

fn field(seed: u64) -> TestField {
    let d = SpaceTimeDomain::interval(-1.0, 1.0, 1.0).unwrap();
    random_test_field(Seed(seed), SpatialBc::None, TemporalCondition::None, &d)
}

#[test]
fn catalog_residuals_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cases = [
        (Family::III { b: 1.0 }, 3.0, 2.0, OperatorParams::new(1.0, -1.0).unwrap()),
        (Family::I { k: 1.0 }, 2.0, 2.0, OperatorParams::new(0.7, -0.5).unwrap()),
    ];
    for (fam, lambda, mu, params) in cases {
        let w = weight(fam, lambda, mu);
        for id in CATALOG {
            let mut worst = 0.0f64;
            for f in 0..50 {
                let z = field(1000 + f);
                let pts: Vec<Vec<f64>> = (0..4)
                    .map(|_| vec![rng.random_range(-0.9..0.9), rng.random_range(0.02..0.98)])
                    .collect();
                worst = worst.max(check_identity(id, &w, &params, &z, &pts).unwrap());
            }
            println!("{id}: {worst:.3e}");
            assert!(worst <= 1e-8, "{id}: {worst}");
        }
    }
}

#[test]
fn zero_field_and_unknown_id() {
    let w = weight(Family::III { b: 1.0 }, 3.0, 2.0);
    let p = OperatorParams::new(1.0, -1.0).unwrap();
    for id in CATALOG {
        let r = check_identity(id, &w, &p, &TestField::zero(1), &[vec![0.1, 0.3]]).unwrap();
        assert_eq!(r, 0.0, "{id}");
    }
    assert!(matches!(
        check_identity("nope", &w, &p, &field(1), &[vec![0.1, 0.3]]),
        Err(Error::UnknownIdentity(_))
    ));
}

#[test]
fn beta_zero_kills_the_p3_identity() {
    let w = weight(Family::III { b: 1.0 }, 3.0, 2.0);
    let p = OperatorParams::new(1.0, 0.0).unwrap();
    let sp = jet_space();
    let c = Ctx::from_z(&sp, &w, &p, &field(5), &[0.2, 0.3]).unwrap();
    let v = evaluate("1208-11a", &c).unwrap();
    assert_eq!(v.lhs, 0.0);
    assert!(v.rhs_terms.iter().all(|t| *t == 0.0));
}
