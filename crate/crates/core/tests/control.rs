use carleman_core::control::*;
use carleman_core::fields::Interval;
use carleman_core::plate::{hinged_modes, PlateBc};
use carleman_core::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn problem(n: usize, omega: (f64, f64), eps: f64, y0: Vec<f64>) -> ControlProblem {
    ControlProblem::new(hinged_modes(n, &[1.0]).unwrap(), 0.1, vec![Interval::new(omega.0, omega.1)], eps, y0).unwrap()
}

fn zero_control(p: &ControlProblem) -> ControlSamples {
    ControlSamples {
        times: p.grid.nodes.clone(),
        coeffs: DMatrix::zeros(p.grid.len(), p.modes()),
    }
}

#[test]
fn free_evolution() {
    let y0: Vec<f64> = (1..=8).map(|j| 1.0 / j as f64).collect();
    let p = problem(8, (0.4, 0.6), 1e-6, y0.clone());
    let y = forward_solve(&p, &zero_control(&p)).unwrap();
    for (n, m) in p.basis.modes.iter().enumerate() {
        assert_eq!(y[n], (-m.eigenvalue * 0.1).exp() * y0[n]);
    }
    let z = problem(8, (0.4, 0.6), 1e-6, vec![0.0; 8]);
    assert_eq!(forward_solve(&z, &zero_control(&z)).unwrap().norm(), 0.0);
}

#[test]
fn constant_control_on_whole_domain() {
    let mut y0 = vec![0.0; 6];
    y0[2] = 0.3;
    let p = problem(6, (0.0, 1.0), 1e-6, y0);
    let mut u = zero_control(&p);
    u.coeffs.column_mut(2).fill(2.0);
    let y = forward_solve(&p, &u).unwrap();
    let l = p.lambda[2];
    let exact = (-l * 0.1).exp() * 0.3 + 2.0 * (1.0 - (-l * 0.1).exp()) / l;
    assert!((y[2] - exact).abs() <= 1e-12 * exact.abs());
    for n in [0, 1, 3, 4, 5] {
        assert!(y[n].abs() < 1e-13);
    }
}

#[test]
fn adjoint_is_backward_exponential() {
    let p = problem(5, (0.4, 0.6), 1e-6, vec![0.0; 5]);
    assert_eq!(adjoint_solve(&p, &DVector::zeros(5)).unwrap().coeffs.norm(), 0.0);
    let mut e = DVector::zeros(5);
    e[1] = 1.0;
    let phi = adjoint_solve(&p, &e).unwrap();
    for (k, s) in p.grid.to_go.iter().enumerate() {
        assert!((p.grid.nodes[k] + s - 0.1).abs() < 1e-16);
        assert_eq!(phi.coeffs[(k, 1)], (-p.lambda[1] * s).exp());
        assert_eq!(phi.coeffs[(k, 0)], 0.0);
    }
    assert!(matches!(adjoint_solve(&p, &DVector::zeros(4)), Err(Error::LengthMismatch { .. })));
}

#[test]
fn time_grid() {
    let p = problem(64, (0.4, 0.6), 1e-10, vec![0.0; 64]);
    assert!(p.grid.len() >= 32);
    let total: f64 = p.grid.weights.iter().sum();
    assert!((total - 0.1).abs() < 1e-15);
    assert!(p.grid.nodes.windows(2).all(|w| w[0] < w[1]));
    assert!(p.grid.nodes.iter().all(|&t| t > 0.0 && t < 0.1));
}

#[test]
fn gramian_matches_solves() {
    let p = problem(64, (0.4, 0.6), 1e-10, vec![0.0; 64]);
    let g = gramian(&p);
    for j in [0, 7, 40, 63] {
        let mut e = DVector::zeros(64);
        e[j] = 1.0;
        let col = gramian_apply(&p, &e).unwrap();
        let err = (&col - g.column(j)).norm() / g.column(j).norm();
        assert!(err < 1e-12, "{j} {err:e}");
    }
    assert!(symmetry_defect(&p, 10, 42).unwrap() <= 1e-10);
    assert!((&g - g.transpose()).abs().max() == 0.0);
}

#[test]
fn duality_identity() {
    let p = problem(64, (0.4, 0.6), 1e-10, vec![0.0; 64]);
    for s in 0..5u64 {
        let phi = DVector::from_fn(64, |i, _| (((i as u64 + 3) * (s + 7)) % 11) as f64 - 5.0);
        assert!(duality_defect(&p, &phi).unwrap() <= 1e-9);
    }
}

#[test]
fn null_data_needs_no_control() {
    let p = problem(16, (0.4, 0.6), 1e-8, vec![0.0; 16]);
    let r = hum_solve(&p, 1e-12, 200).unwrap();
    assert_eq!(r.final_norm, 0.0);
    assert_eq!(r.cost, 0.0);
    assert_eq!(r.iterations, 0);
    assert!(r.converged);
    assert!(r.control.coeffs.iter().all(|&c| c == 0.0));
}

#[test]
fn whole_domain_single_mode_is_closed_form() {
    let mut y0 = vec![0.0; 10];
    y0[0] = 1.0;
    let eps = 1e-6;
    let p = problem(10, (0.0, 1.0), eps, y0);
    let r = hum_solve(&p, 1e-10, 200).unwrap();
    assert_eq!(r.iterations, 1);
    let l = p.lambda[0];
    let g = (1.0 - (-2.0 * l * 0.1).exp()) / (2.0 * l);
    let phi = -(-l * 0.1).exp() / (g + eps);
    assert!((r.phi_t[0] - phi).abs() <= 1e-10 * phi.abs());
    assert!((r.final_norm - eps * phi.abs()).abs() <= 1e-8 * eps * phi.abs());
}

#[test]
fn hinged_hum_reaches_target() {
    let p = ControlConfig::default().build().unwrap();
    let r = hum_solve(&p, 1e-12, 200).unwrap();
    eprintln!(
        "iters {} rel {:e} cost {:e} conv {} proxy {:e}",
        r.iterations,
        r.relative_final(),
        r.cost,
        r.converged,
        observability_proxy(&p)
    );
    assert!(r.iterations <= 200);
    assert!(r.relative_final() <= 1e-3);
    let free = p.free_final().norm() / p.y0.norm();
    assert!(r.relative_final() < free);
    assert!(r.residuals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8)));
    assert!(symmetry_defect(&p, 10, 42).unwrap() <= 1e-10);
    assert!(duality_defect(&p, &DVector::from_vec(r.phi_t.clone())).unwrap() <= 1e-9);
    assert!((r.cost - observed_energy(&p, &DVector::from_vec(r.phi_t.clone())).unwrap()).abs() <= 1e-12 * r.cost);
}

#[test]
fn smaller_penalty_controls_better() {
    let mut last = f64::INFINITY;
    for eps in [1e-4, 1e-6, 1e-8, 1e-10] {
        let cfg = ControlConfig {
            modes: 24,
            epsilon: eps,
            ..ControlConfig::default()
        };
        let p = cfg.build().unwrap();
        let r = hum_solve(&p, 1e-14, 2000).unwrap();
        let direct = (gramian(&p) + DMatrix::identity(24, 24) * eps)
            .cholesky()
            .unwrap()
            .solve(&-p.free_final());
        let exact = (direct * eps).norm();
        assert!((r.final_norm - exact).abs() <= 1e-6 * exact + 1e-15, "{eps}");
        assert!(exact <= last);
        last = exact;
    }
}

#[test]
fn budget_exhaustion_is_flagged() {
    let p = ControlConfig::default().build().unwrap();
    let r = hum_solve(&p, 1e-30, 3).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 3);
    assert!(r.final_norm.is_finite());
}

#[test]
fn config_validation_and_outputs() {
    let bad = [
        ControlConfig { horizon: 0.0, ..ControlConfig::default() },
        ControlConfig { epsilon: 0.0, ..ControlConfig::default() },
        ControlConfig { omega: vec![Interval::new(0.6, 0.4)], ..ControlConfig::default() },
        ControlConfig { y0: Some(vec![1.0; 3]), ..ControlConfig::default() },
        ControlConfig { bc: PlateBc::Clamped, lengths: vec![1.0, 1.0], ..ControlConfig::default() },
    ];
    for c in bad {
        assert!(c.build().is_err(), "{c:?}");
    }
    let js = r#"{"bc":"hinged","modes":8,"lengths":[1.0],"horizon":0.1,"omega":[{"lo":0.4,"hi":0.6}],"epsilon":1e-8}"#;
    let cfg: ControlConfig = serde_json::from_str(js).unwrap();
    assert_eq!(cfg.max_iter, 200);
    assert!(serde_json::from_str::<ControlConfig>(&js.replace("}", r#","extra":1}"#).replacen(r#","extra":1}"#, "}", 1)).is_err());
    let p = cfg.build().unwrap();
    let r = hum_solve(&p, 1e-12, 200).unwrap();
    let csv = r.control_csv();
    assert!(csv.starts_with("t,mode,coefficient\n"));
    assert_eq!(csv.lines().count(), 1 + p.grid.len() * 8);
    assert_eq!(csv, hum_solve(&p, 1e-12, 200).unwrap().control_csv());
    assert!(serde_json::to_string(&r).is_ok());
}

#[test]
fn two_dimensional_problem() {
    let p = ControlProblem::new(
        hinged_modes(20, &[1.0, 1.0]).unwrap(),
        0.05,
        vec![Interval::new(0.3, 0.7), Interval::new(0.3, 0.7)],
        1e-8,
        (0..20).map(|j| 1.0 / (j + 1) as f64).collect(),
    )
    .unwrap();
    let r = hum_solve(&p, 1e-12, 200).unwrap();
    assert!(r.converged);
    assert!(r.relative_final() < p.free_final().norm() / p.y0.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gramian_is_psd(lo in 0.0f64..0.8, w in 0.05f64..0.2, seed in any::<u64>()) {
        let p = problem(16, (lo, (lo + w).min(1.0)), 1e-8, vec![0.0; 16]);
        let g = gramian(&p);
        let v = DVector::from_fn(16, |i, _| (((seed >> (i % 60)) & 7) as f64) - 3.5);
        prop_assert!((&g * &v).dot(&v) >= -1e-15 * v.norm_squared());
        prop_assert!(observed_energy(&p, &v).unwrap() >= 0.0);
        prop_assert!(symmetry_defect(&p, 2, seed).unwrap() <= 1e-10);
    }
}
