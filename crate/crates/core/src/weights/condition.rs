use serde::{Deserialize, Serialize};

use super::field::WeightField;
use crate::fields::QuadratureGrid;
use crate::jet::JetSpace;
use crate::par;

/// Result of checking the derivative identities and temporal bounds of a
/// weight on the nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Max relative residual of ∇ℓ = λμφ∇η̂ and
    /// ∇²ℓ = λμ²φ∇η̂⊗∇η̂ + λμφ∇²η̂.
    pub max_residual_gradient: f64,
    /// Smallest C with |φ_s| ≤ Cφ³ and |φ_ss| ≤ Cφ⁵ on the grid.
    pub fitted_c: f64,
    pub nodes: usize,
    pub nonfinite_nodes: usize,
    pub pass: bool,
}

pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn check_condition_1_1(weight: &WeightField, grid: &QuadratureGrid) -> ConditionReport {
    let d = weight.dim();
    let (lambda, mu) = (weight.lambda(), weight.mu());
    let sp = JetSpace::new(d + 1, 2);
    let per_node = par::map_range(grid.node_count(), |i| {
        let p = grid.node(i);
        let Ok(j) = weight.jets(&sp, &p) else {
            return None;
        };
        let mut o = vec![0usize; d + 1];
        let mut part = |pairs: &[(usize, usize)], jet: &crate::jet::Jet<'_>| {
            o.iter_mut().for_each(|x| *x = 0);
            for &(v, k) in pairs {
                o[v] += k;
            }
            jet.partial(&o)
        };
        let phi = j.phi.value();
        let ge: Vec<f64> = (1..=d).map(|i| part(&[(i, 1)], &j.eta)).collect();
        let gnorm: f64 = ge.iter().map(|g| g * g).sum::<f64>().sqrt();
        let mut hnorm = 0.0f64;
        let mut res = 0.0f64;
        let mut terms = Vec::new();
        for i in 1..=d {
            let lhs = part(&[(i, 1)], &j.ell);
            terms.push((lhs, lambda * mu * phi * ge[i - 1]));
            for k in 1..=d {
                let hik = part(&[(i, 1), (k, 1)], &j.eta);
                hnorm = hnorm.max(hik.abs());
                let lhs = part(&[(i, 1), (k, 1)], &j.ell);
                let rhs = lambda * mu * mu * phi * ge[i - 1] * ge[k - 1] + lambda * mu * phi * hik;
                terms.push((lhs, rhs));
            }
        }
        let scale = lambda * mu * phi * (gnorm + mu * gnorm * gnorm + hnorm);
        if scale > 0.0 {
            for (l, r) in terms {
                res = res.max((l - r).abs() / scale);
            }
        }
        let phi_s = part(&[(0, 1)], &j.phi);
        let phi_ss = part(&[(0, 2)], &j.phi);
        let c = (phi_s.abs() / phi.powi(3)).max(phi_ss.abs() / phi.powi(5));
        if !(res.is_finite() && c.is_finite()) {
            return None;
        }
        Some((res, c))
    });
    let mut max_res = 0.0f64;
    let mut c = 0.0f64;
    let mut bad = 0;
    for r in &per_node {
        match r {
            Some((a, b)) => {
                max_res = max_res.max(*a);
                c = c.max(*b);
            }
            None => bad += 1,
        }
    }
    ConditionReport {
        max_residual_gradient: max_res,
        fitted_c: c,
        nodes: per_node.len(),
        nonfinite_nodes: bad,
        pass: bad == 0 && max_res <= RESIDUAL_TOL && c.is_finite(),
    }
}

/// The slab parameters (b, b0) for which a family-III weight with
/// normalized η satisfies φ ≥ 2 + e^μ on |s| ≤ 1 and φ ≤ 1 + e^μ on
/// b0 ≤ |s| ≤ b.
pub fn family_iii_slab(mu: f64) -> (f64, f64) {
    let b2 = 1.0 + (2.0 + mu.exp()).ln() / mu;
    let b02 = b2 - ((1.0 + mu.exp()) / mu.exp()).ln() / mu;
    (b2.sqrt(), b02.sqrt())
}
