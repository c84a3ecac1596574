use serde::{Deserialize, Serialize};

use super::points::{field_point, ZPoint};
use super::OperatorParams;
use crate::fields::TestField;
use crate::weights::{WeightField, WeightPoint};
use crate::{Error, Result};

/// Largest λμφ accepted before quartic terms in the expansion could overflow.
pub const OVERFLOW_BOUND: f64 = 1e60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompCoefficients {
    /// E = 4∇A + 4Δℓ∇ℓ.
    pub e: Vec<f64>,
    /// F = Δ²ℓ − 2∇·(A∇ℓ).
    pub f: f64,
    /// Φ = −βλ³μ^{7/2}φ³|∇η|⁴.
    pub phi_coef: f64,
    /// Z = 8λμφ.
    pub z_coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub conjugated: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub pr: f64,
    pub p4: f64,
    pub j1: f64,
    pub j2: f64,
    pub residual: f64,
    pub coefficients: DecompCoefficients,
}

impl DecompositionResult {
    /// |residual| / (1 + |P₁| + |P₂| + |Pᵣ|).
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / (1.0 + self.p1.abs() + self.p2.abs() + self.pr.abs())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn frob(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).map(|(r, q)| dot(r, q)).sum()
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| dot(r, v)).collect()
}

/// Derived weight quantities shared by the expansion and the split.
struct Derived {
    grad_a: Vec<f64>,
    cap: f64,
    grad_cap: Vec<f64>,
    lap_cap: f64,
}

fn derived(wp: &WeightPoint) -> Derived {
    let hg = mat_vec(&wp.hess_ell, &wp.grad_ell);
    let grad_a: Vec<f64> = hg.iter().map(|x| 2.0 * x).collect();
    let lap_a = 2.0 * frob(&wp.hess_ell, &wp.hess_ell) + 2.0 * dot(&wp.grad_ell, &wp.grad_lap_ell);
    let grad_cap = grad_a.iter().zip(&wp.grad_lap_ell).map(|(a, b)| a - b).collect();
    Derived {
        lap_cap: lap_a - wp.bilap_ell,
        cap: wp.cap_lambda,
        grad_a,
        grad_cap,
    }
}

fn check_overflow(w: &WeightField, wp: &WeightPoint) -> Result<()> {
    let lmf = w.lambda() * w.mu() * wp.phi;
    if !lmf.is_finite() || lmf > OVERFLOW_BOUND {
        return Err(Error::WeightOverflow);
    }
    Ok(())
}

/// θP(θ⁻¹z) from the term-by-term expansion in ℓ-derivatives.
pub fn conjugated_expansion(params: &OperatorParams, wp: &WeightPoint, z: &ZPoint) -> f64 {
    let g = &wp.grad_ell;
    let dv = derived(wp);
    let (a, b) = (params.alpha, params.beta);
    let time = a * (z.z_s - wp.ell_s * z.z)
        + b * (z.z_ss - 2.0 * wp.ell_s * z.z_s + (wp.ell_s * wp.ell_s - wp.ell_ss) * z.z);
    let hg = mat_vec(&wp.hess_ell, g);
    let zgg = dot(&mat_vec(&z.hess, g), g);
    let g_gz = dot(g, &z.grad);
    let bi = z.bilap - 2.0 * dot(&wp.grad_lap_ell, &z.grad) - 4.0 * frob(&wp.hess_ell, &z.hess)
        - 4.0 * dot(g, &z.grad_lap)
        + dv.lap_cap * z.z
        + 2.0 * dot(&dv.grad_cap, &z.grad)
        + 2.0 * dv.cap * z.lap
        + 4.0 * dot(&hg, &z.grad)
        + 4.0 * zgg
        - 2.0 * dot(g, &dv.grad_cap) * z.z
        - 4.0 * dv.cap * g_gz
        + dv.cap * dv.cap * z.z;
    time + bi
}

/// Split of θP(θ⁻¹z) at one point from precomputed bundles.
pub fn decompose(
    w: &WeightField,
    params: &OperatorParams,
    wp: &WeightPoint,
    z: &ZPoint,
) -> DecompositionResult {
    let (lambda, mu) = (w.lambda(), w.mu());
    let (al, be) = (params.alpha, params.beta);
    let g = &wp.grad_ell;
    let dv = derived(wp);
    let a = wp.a;
    let e: Vec<f64> = dv
        .grad_a
        .iter()
        .zip(g)
        .map(|(ga, gi)| 4.0 * ga + 4.0 * wp.lap_ell * gi)
        .collect();
    let f = wp.bilap_ell - 2.0 * dot(&dv.grad_a, g) - 2.0 * a * wp.lap_ell;
    let eta4 = dot(&wp.grad_eta, &wp.grad_eta).powi(2);
    let phi_coef = if be == 0.0 {
        0.0
    } else {
        -be * lambda.powi(3) * mu.powf(3.5) * wp.phi.powi(3) * eta4
    };
    let z_coef = 8.0 * lambda * mu * wp.phi;

    let zgg = dot(&mat_vec(&z.hess, g), g);
    let g_gz = dot(g, &z.grad);
    let j1 = z.bilap + a * a * z.z + 2.0 * a * z.lap + 4.0 * zgg + dot(&e, &z.grad);
    let j2 = -4.0 * dot(g, &z.grad_lap)
        - 4.0 * frob(&wp.hess_ell, &z.hess)
        - 2.0 * wp.lap_ell * z.lap
        - 4.0 * a * g_gz
        + f * z.z;
    let p1 = be * z.z_ss + j1;
    let p2 = al * z.z_s + j2;
    let pr = (dv.lap_cap + 2.0 * dot(g, &wp.grad_lap_ell) - wp.bilap_ell
        + wp.lap_ell * wp.lap_ell
        - al * wp.ell_s
        + be * wp.ell_s * wp.ell_s
        - be * wp.ell_ss)
        * z.z
        - 4.0 * dot(&wp.grad_lap_ell, &z.grad)
        - 2.0 * be * wp.ell_s * z.z_s;
    let p3 = phi_coef * z.z + z_coef * frob(&wp.hess_eta, &z.hess);
    let conjugated = conjugated_expansion(params, wp, z);
    DecompositionResult {
        conjugated,
        p1,
        p2,
        p3,
        pr,
        p4: pr - p3,
        j1,
        j2,
        residual: conjugated - (p1 + p2 + pr),
        coefficients: DecompCoefficients {
            e,
            f,
            phi_coef,
            z_coef,
        },
    }
}

/// θP(θ⁻¹z) at `p` for a test field z.
pub fn conjugated_apply(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    p: &[f64],
) -> Result<f64> {
    let wp = w.point(p)?;
    check_overflow(w, &wp)?;
    Ok(conjugated_expansion(params, &wp, &field_point(z, p)))
}

pub fn decomposition(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    p: &[f64],
) -> Result<DecompositionResult> {
    let wp = w.point(p)?;
    check_overflow(w, &wp)?;
    Ok(decompose(w, params, &wp, &field_point(z, p)))
}
