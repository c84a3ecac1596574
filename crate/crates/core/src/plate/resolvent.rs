use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::operator::PlateOperator;
use crate::numeric::sci17;
use crate::{par, Error, Result};

/// Smallest accepted σ_min/σ_max before the shifted generator counts as
/// singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

/// Attached to every scan: growth is measured against the frequency |γ|.
pub const GROWTH_NOTE: &str = "exponential growth is fitted in the frequency |γ|";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventSample {
    pub gamma: f64,
    /// ‖(𝒜 − iγ)⁻¹‖ in the energy norm.
    pub norm: f64,
    /// σ_min/σ_max of 𝒜 − iγ.
    pub rcond: f64,
}

/// ‖(𝒜 − iγ)⁻¹‖ as 1/σ_min of the shifted modal generator.
pub fn resolvent_norm(op: &PlateOperator, gamma: f64) -> Result<ResolventSample> {
    let m = op.system_matrix();
    let n = m.nrows();
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        Complex::new(m[(i, j)], if i == j { -gamma } else { 0.0 })
    });
    let sv = shifted.singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    let rcond = smin / smax;
    if !(rcond > SINGULAR_RCOND) {
        return Err(Error::Singular(format!("𝒜 − iγ at γ = {gamma} (σ_min/σ_max = {rcond:e})")));
    }
    Ok(ResolventSample {
        gamma,
        norm: 1.0 / smin,
        rcond,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventScan {
    pub table: Vec<ResolventSample>,
    /// max_γ log‖R(iγ)‖/|γ|.
    pub rate: f64,
    /// Least-squares line log‖R‖ ≈ slope·|γ| + intercept.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Intercept lifting the least-squares line above every sample.
    pub envelope_intercept: f64,
    pub notes: Vec<String>,
}

/// `samples` log-spaced γ in [1, γ_max].
pub fn scan_gammas(gamma_max: f64, samples: usize) -> Vec<f64> {
    let k = samples.max(2);
    (0..k)
        .map(|j| (gamma_max.ln() * j as f64 / (k - 1) as f64).exp())
        .collect()
}

pub fn resolvent_scan(op: &PlateOperator, gamma_max: f64, samples: usize) -> Result<ResolventScan> {
    if !(gamma_max > 1.0) || samples < 2 {
        return Err(Error::Config(format!(
            "need γ_max > 1 and at least 2 samples, got {gamma_max}, {samples}"
        )));
    }
    let gammas = scan_gammas(gamma_max, samples);
    let table = par::map_slice(&gammas, |&g| resolvent_norm(op, g)).into_iter().collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = table.iter().map(|s| s.gamma.abs()).collect();
    let ys: Vec<f64> = table.iter().map(|s| s.norm.ln()).collect();
    let rate = xs.iter().zip(&ys).map(|(x, y)| y / x).fold(f64::NEG_INFINITY, f64::max);
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let envelope_intercept = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - slope * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ResolventScan {
        table,
        rate,
        slope,
        intercept,
        r2,
        envelope_intercept,
        notes: vec![GROWTH_NOTE.to_string()],
    })
}

impl ResolventScan {
    /// Rows `gamma,resolvent_norm`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma,resolvent_norm\n");
        for r in &self.table {
            s.push_str(&format!("{},{}\n", sci17(r.gamma), sci17(r.norm)));
        }
        s
    }
}
