use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::{adjoint_solve, forward_solve, ControlProblem, ControlSamples};
use crate::numeric::sci17;
use crate::{par, Result};

/// ∫₀ᵀ e^{−cs} ds.
fn kernel_integral(c: f64, t: f64) -> f64 {
    if c * t < 1e-300 {
        t
    } else {
        -(-c * t).exp_m1() / c
    }
}

/// Closed-form Gramian Λ_mn = χ_mn ∫₀ᵀ e^{−(λ_m+λ_n)s} ds, the map from φ_T
/// to the final state driven by χ_ω φ.
pub fn gramian(p: &ControlProblem) -> DMatrix<f64> {
    let n = p.modes();
    DMatrix::from_fn(n, n, |i, j| p.chi[(i, j)] * kernel_integral(p.lambda[i] + p.lambda[j], p.horizon))
}

/// Λφ_T through an adjoint solve followed by a forward solve from y⁰ = 0.
pub fn gramian_apply(p: &ControlProblem, phi_t: &DVector<f64>) -> Result<DVector<f64>> {
    let u = adjoint_solve(p, phi_t)?;
    Ok(forward_solve(p, &u)? - p.free_final())
}

/// ∫₀ᵀ ‖χ_ω φ(t)‖² dt on the time grid.
pub fn observed_energy(p: &ControlProblem, phi_t: &DVector<f64>) -> Result<f64> {
    let u = adjoint_solve(p, phi_t)?;
    Ok(samples_cost(p, &u))
}

fn samples_cost(p: &ControlProblem, u: &ControlSamples) -> f64 {
    let cu = &u.coeffs * &p.chi;
    p.grid
        .weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * cu.row(k).dot(&u.coeffs.row(k)))
        .sum()
}

/// |⟨Λφ, φ⟩ − ∫‖χ_ω φ‖²| relative to the pairing, with Λ in closed form.
pub fn duality_defect(p: &ControlProblem, phi_t: &DVector<f64>) -> Result<f64> {
    let g = gramian(p);
    let pair = (&g * phi_t).dot(phi_t);
    let obs = observed_energy(p, phi_t)?;
    Ok(if pair == 0.0 && obs == 0.0 {
        0.0
    } else {
        (pair - obs).abs() / pair.abs().max(obs.abs())
    })
}

/// Largest |⟨Λφ, ψ⟩ − ⟨φ, Λψ⟩| / (‖Λφ‖‖ψ‖ + ‖φ‖‖Λψ‖) over random probe
/// pairs, Λ applied through the forward and adjoint solves.
pub fn symmetry_defect(p: &ControlProblem, probes: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.modes();
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let a = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let la = gramian_apply(p, &a)?;
        let lb = gramian_apply(p, &b)?;
        let scale = la.norm() * b.norm() + a.norm() * lb.norm();
        if scale > 0.0 {
            worst = worst.max((la.dot(&b) - a.dot(&lb)).abs() / scale);
        }
    }
    Ok(worst)
}

/// Smallest eigenvalue of the closed-form Gramian, reported as an
/// empirical observability proxy.
pub fn observability_proxy(p: &ControlProblem) -> f64 {
    gramian(p).symmetric_eigen().eigenvalues.min()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumResult {
    /// φ_T solving (Λ + εI)φ_T = −y_free(T).
    pub phi_t: Vec<f64>,
    /// Modal coefficients of u = χ_ω φ on the time grid.
    pub control: ControlSamples,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// ∫₀ᵀ ‖u‖² dt.
    pub cost: f64,
    pub iterations: usize,
    /// ‖r_k‖ of the Krylov iteration, starting with ‖b‖.
    pub residuals: Vec<f64>,
    /// False when the iteration budget ran out first.
    pub converged: bool,
}

impl HumResult {
    pub fn relative_final(&self) -> f64 {
        if self.initial_norm > 0.0 {
            self.final_norm / self.initial_norm
        } else {
            0.0
        }
    }

    /// Rows `t,mode,coefficient` with 1-based mode numbers.
    pub fn control_csv(&self) -> String {
        let mut s = String::from("t,mode,coefficient\n");
        for (k, t) in self.control.times.iter().enumerate() {
            for m in 0..self.control.coeffs.ncols() {
                s.push_str(&format!("{},{},{}\n", sci17(*t), m + 1, sci17(self.control.coeffs[(k, m)])));
            }
        }
        s
    }
}

/// Conjugate-residual iteration for the symmetric positive definite system
/// A x = b; the residual norm is non-increasing.
pub fn conjugate_residual<F>(apply: F, b: &DVector<f64>, tol: f64, max_iter: usize) -> (DVector<f64>, Vec<f64>, bool)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = DVector::zeros(b.len());
    let bn = b.norm();
    let mut hist = vec![bn];
    if bn == 0.0 {
        return (x, hist, true);
    }
    let mut r = b.clone();
    let mut ar = apply(&r);
    let mut p = r.clone();
    let mut ap = ar.clone();
    let mut rar = r.dot(&ar);
    for _ in 0..max_iter {
        let app = ap.dot(&ap);
        if !(app > 0.0) {
            break;
        }
        let alpha = rar / app;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        hist.push(r.norm());
        if r.norm() <= tol * bn {
            return (x, hist, true);
        }
        ar = apply(&r);
        let rar_new = r.dot(&ar);
        let beta = rar_new / rar;
        rar = rar_new;
        p = &r + &p * beta;
        ap = &ar + &ap * beta;
    }
    let done = *hist.last().expect("nonempty") <= tol * bn;
    (x, hist, done)
}

/// Penalized HUM: solves (Λ + εI)φ_T = −y_free(T) and drives the system
/// with u = χ_ω φ.
pub fn hum_solve(p: &ControlProblem, tol: f64, max_iter: usize) -> Result<HumResult> {
    let g = gramian(p);
    let eps = p.epsilon;
    let n = p.modes();
    let apply = |v: &DVector<f64>| {
        let rows = par::map_range(n, |i| g.row(i).transpose().dot(v) + eps * v[i]);
        DVector::from_vec(rows)
    };
    let b = -p.free_final();
    let (phi_t, residuals, converged) = conjugate_residual(apply, &b, tol, max_iter);
    let u = adjoint_solve(p, &phi_t)?;
    let y_t = forward_solve(p, &u)?;
    let cost = samples_cost(p, &u);
    let control = ControlSamples {
        times: u.times.clone(),
        coeffs: &u.coeffs * &p.chi,
    };
    Ok(HumResult {
        phi_t: phi_t.iter().cloned().collect(),
        control,
        initial_norm: p.y0.norm(),
        final_norm: y_t.norm(),
        cost,
        iterations: residuals.len() - 1,
        residuals,
        converged,
    })
}
