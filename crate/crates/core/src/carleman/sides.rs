use serde::{Deserialize, Serialize};

use super::table::{log_integrate, log_integrate_lines, LogAcc, Tables};
use crate::conjugation::OperatorParams;
use crate::energies::NamedIntegral;
use crate::fields::{Interval, QuadratureGrid, SpatialBc, TestField};
use crate::weights::{FamilyTag, WeightField};
use crate::{Error, Result};

/// Largest admissible boundary-condition violation at a sample point.
pub const BC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Clamped,
    Hinged,
}

impl From<BoundaryCondition> for SpatialBc {
    fn from(b: BoundaryCondition) -> Self {
        match b {
            BoundaryCondition::Clamped => SpatialBc::Clamped,
            BoundaryCondition::Hinged => SpatialBc::Hinged,
        }
    }
}

/// Which conditions at the slab ends are required of v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    None,
    /// v_s = 0.
    Derivative,
    /// v = v_s = 0.
    ValueAndDerivative,
}

/// Samples the spatial and temporal faces and fails on the first violation
/// larger than [`BC_TOL`] (relative to 1 + the largest sampled |v|).
pub fn check_conditions(v: &TestField, bc: BoundaryCondition, ends: EndCondition, w: &WeightField) -> Result<()> {
    const N: usize = 33;
    let d = &w.domain;
    let len = d.lengths[0];
    let lerp = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (N - 1) as f64;
    let mut scale: f64 = 1.0;
    for i in 0..N {
        for j in 0..N {
            scale = scale.max(v.value(&[lerp(d.b1, d.b2, i), lerp(0.0, len, j)]).abs());
        }
    }
    let tol = BC_TOL * scale;
    let order2 = match bc {
        BoundaryCondition::Clamped => 1,
        BoundaryCondition::Hinged => 2,
    };
    for i in 0..N {
        let s = lerp(d.b1, d.b2, i);
        for x in [0.0, len] {
            for o in [0, order2] {
                let r = v.partial_unchecked(&[0, o], &[s, x]);
                if r.abs() > tol {
                    return Err(Error::BoundaryViolation(format!(
                        "∂x^{o} v = {r:e} at (s, x) = ({s}, {x})"
                    )));
                }
            }
        }
    }
    let orders: &[usize] = match ends {
        EndCondition::None => &[],
        EndCondition::Derivative => &[1],
        EndCondition::ValueAndDerivative => &[0, 1],
    };
    for j in 0..N {
        let x = lerp(0.0, len, j);
        for s in [d.b1, d.b2] {
            for &o in orders {
                let r = v.partial_unchecked(&[o, 0], &[s, x]);
                if r.abs() > tol {
                    return Err(Error::BoundaryViolation(format!(
                        "∂s^{o} v = {r:e} at (s, x) = ({s}, {x})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Reference exponent and the accumulators rescaled by it.
fn rescale(accs: &[&[LogAcc]]) -> (f64, Vec<Vec<f64>>) {
    let r = accs
        .iter()
        .flat_map(|a| a.iter().map(|x| x.log_abs()))
        .fold(f64::NEG_INFINITY, f64::max);
    let r = if r.is_finite() { r } else { 0.0 };
    (r, accs.iter().map(|a| a.iter().map(|x| x.scaled(r)).collect()).collect())
}

fn named(names: &[&str], values: &[f64]) -> Vec<NamedIntegral> {
    names
        .iter()
        .zip(values)
        .map(|(n, &v)| NamedIntegral {
            name: n.to_string(),
            value: v,
        })
        .collect()
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs / rhs
    } else {
        f64::INFINITY
    }
}

/// Integrated sides of a Carleman inequality. Every integral is stored
/// multiplied by `e^{−log_scale}`, so ratios do not depend on how θ is
/// normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanSides {
    pub lhs_terms: Vec<NamedIntegral>,
    /// ‖θPv‖².
    pub source: f64,
    /// λ⁷μ⁸∫∫_ω φ⁷θ²v².
    pub window: f64,
    pub log_scale: f64,
}

impl CarlemanSides {
    pub fn lhs(&self) -> f64 {
        self.lhs_terms.iter().map(|t| t.value).sum()
    }

    pub fn rhs(&self) -> f64 {
        self.source + self.window
    }

    /// LHS/RHS; 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs(), self.rhs())
    }
}

fn tables(w: &WeightField, v: &TestField, grid: &QuadratureGrid) -> Result<Tables> {
    if w.dim() != 1 || grid.axes.len() != 2 {
        return Err(Error::DimensionUnsupported {
            dim: w.dim(),
            what: "Carleman harness",
        });
    }
    Tables::new(w, v, &grid.axes[0].nodes, &grid.axes[1].nodes)
}

const BETA_NEG_LHS: [&str; 4] = ["l6m8phi6_v2", "l4m6phi4_vx2", "l3m35phi3_lapv2_vs2", "lm15phi_gradlapv2_gradvs2"];
const BETA_ZERO_LHS: [&str; 5] = ["inv_lphi_avs2_bilapv2", "l6m8phi6_v2", "l4m6phi4_vx2", "l3m4phi3_lapv2", "lm2phi_gradlapv2"];

/// Both sides of the β < 0 estimate for a field with the spatial condition
/// `bc` and v = v_s = 0 at the slab ends.
pub fn carleman_sides_beta_neg(
    w: &WeightField,
    params: &OperatorParams,
    v: &TestField,
    bc: BoundaryCondition,
    omega: Interval,
    grid: &QuadratureGrid,
) -> Result<CarlemanSides> {
    if params.beta >= 0.0 {
        return Err(Error::Config(format!("β < 0 required, got {}", params.beta)));
    }
    check_conditions(v, bc, EndCondition::ValueAndDerivative, w)?;
    let tab = tables(w, v, grid)?;
    let (l, m) = (w.lambda(), w.mu());
    let (a, b) = (params.alpha, params.beta);
    let c_win = l.powi(7) * m.powi(8);
    let acc = log_integrate(&tab, grid, 6, |n, q| {
        let v = &n.v;
        let phi = n.phi;
        q[0] = l.powi(6) * m.powi(8) * phi.powi(6) * v[0][0] * v[0][0];
        q[1] = l.powi(4) * m.powi(6) * phi.powi(4) * v[0][1] * v[0][1];
        q[2] = l.powi(3) * m.powf(3.5) * phi.powi(3) * (v[0][2] * v[0][2] + v[1][0] * v[1][0]);
        q[3] = l * m.powf(1.5) * phi * (v[0][3] * v[0][3] + v[1][1] * v[1][1]);
        let pv = a * v[1][0] + b * v[2][0] + v[0][4];
        q[4] = pv * pv;
        if omega.contains(n.x) {
            q[5] = c_win * phi.powi(7) * v[0][0] * v[0][0];
        }
    });
    let (r, vals) = rescale(&[&acc]);
    let vals = &vals[0];
    Ok(CarlemanSides {
        lhs_terms: named(&BETA_NEG_LHS, &vals[..4]),
        source: vals[4],
        window: vals[5],
        log_scale: r,
    })
}

/// Both sides of the β = 0 estimate. The weight must vanish at the slab
/// ends, i.e. belong to family I.
pub fn carleman_sides_beta_zero(
    w: &WeightField,
    params: &OperatorParams,
    v: &TestField,
    bc: BoundaryCondition,
    omega: Interval,
    grid: &QuadratureGrid,
) -> Result<CarlemanSides> {
    if w.spec.family.tag() != FamilyTag::I {
        return Err(Error::InvalidWeight("β = 0 estimate needs θ = 0 at the slab ends (family I)".into()));
    }
    if params.beta != 0.0 || params.alpha == 0.0 {
        return Err(Error::Config(format!(
            "β = 0 and α ≠ 0 required, got α = {}, β = {}",
            params.alpha, params.beta
        )));
    }
    check_conditions(v, bc, EndCondition::None, w)?;
    let tab = tables(w, v, grid)?;
    let (l, m) = (w.lambda(), w.mu());
    let a = params.alpha;
    let c_win = l.powi(7) * m.powi(8);
    let acc = log_integrate(&tab, grid, 7, |n, q| {
        let v = &n.v;
        let phi = n.phi;
        let (avs, bi) = (a * v[1][0], v[0][4]);
        q[0] = (avs * avs + bi * bi) / (l * phi);
        q[1] = l.powi(6) * m.powi(8) * phi.powi(6) * v[0][0] * v[0][0];
        q[2] = l.powi(4) * m.powi(6) * phi.powi(4) * v[0][1] * v[0][1];
        q[3] = l.powi(3) * m.powi(4) * phi.powi(3) * v[0][2] * v[0][2];
        q[4] = l * m * m * phi * v[0][3] * v[0][3];
        q[5] = (avs + bi) * (avs + bi);
        if omega.contains(n.x) {
            q[6] = c_win * phi.powi(7) * v[0][0] * v[0][0];
        }
    });
    let (r, vals) = rescale(&[&acc]);
    let vals = &vals[0];
    Ok(CarlemanSides {
        lhs_terms: named(&BETA_ZERO_LHS, &vals[..5]),
        source: vals[5],
        window: vals[6],
        log_scale: r,
    })
}

/// Sides of the gradient estimate for β < 0 and v_s = 0 at the slab ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma25Sides {
    /// ∫(−βλμ^{3/2}φθ²v‴² + β²λμ^{3/2}φθ²v_sx²).
    pub lhs: f64,
    /// ‖θPv‖².
    pub source: f64,
    /// ∫λ³μ^{7/2}φ³θ²v_s².
    pub vs_term: f64,
    /// ∫(A₂ + A₃) with z = θv.
    pub low_order: f64,
    /// Σ over the spatial faces of ∫(λ²μ³φ²θ²v″² + θ²v‴²) ds; clamped only.
    pub boundary: Option<f64>,
    pub log_scale: f64,
}

impl Lemma25Sides {
    pub fn rhs(&self) -> f64 {
        self.source + self.vs_term + self.low_order + self.boundary.unwrap_or(0.0)
    }

    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs())
    }
}

pub fn lemma_2_5_sides(
    w: &WeightField,
    params: &OperatorParams,
    v: &TestField,
    bc: BoundaryCondition,
    grid: &QuadratureGrid,
) -> Result<Lemma25Sides> {
    if params.beta >= 0.0 {
        return Err(Error::Config(format!("β < 0 required, got {}", params.beta)));
    }
    check_conditions(v, bc, EndCondition::Derivative, w)?;
    let tab = tables(w, v, grid)?;
    let (l, m) = (w.lambda(), w.mu());
    let (a, b) = (params.alpha, params.beta);
    let acc = log_integrate(&tab, grid, 4, |n, q| {
        let v = &n.v;
        let phi = n.phi;
        q[0] = -b * l * m.powf(1.5) * phi * v[0][3] * v[0][3] + b * b * l * m.powf(1.5) * phi * v[1][1] * v[1][1];
        let pv = a * v[1][0] + b * v[2][0] + v[0][4];
        q[1] = pv * pv;
        q[2] = l.powi(3) * m.powf(3.5) * phi.powi(3) * v[1][0] * v[1][0];
        // z = θv: z″/θ and z_s/θ
        let zxx = v[0][2] + 2.0 * n.ell_x * v[0][1] + (n.ell_xx + n.ell_x * n.ell_x) * v[0][0];
        let zs = v[1][0] + n.ell_s * v[0][0];
        q[3] = l * m.powi(3) * phi * (m + l * phi) * zxx * zxx + (b * l).powi(2) * m.powi(3) * phi * phi * zs * zs;
    });
    let faces = match bc {
        BoundaryCondition::Clamped => {
            let ftab = Tables::new(w, v, &grid.axes[0].nodes, &[0.0, w.domain.lengths[0]])?;
            Some(log_integrate_lines(&ftab, &grid.axes[0].weights, 1, |n, q| {
                let v = &n.v;
                q[0] = l * l * m.powi(3) * n.phi * n.phi * v[0][2] * v[0][2] + v[0][3] * v[0][3];
            }))
        }
        BoundaryCondition::Hinged => None,
    };
    let empty = Vec::new();
    let (r, vals) = rescale(&[&acc, faces.as_ref().unwrap_or(&empty)]);
    Ok(Lemma25Sides {
        lhs: vals[0][0],
        source: vals[0][1],
        vs_term: vals[0][2],
        low_order: vals[0][3],
        boundary: faces.map(|_| vals[1][0]),
        log_scale: r,
    })
}

/// Relative defect max(0, LHS − C·RHS)/RHS of one field for a constant
/// `c_fit` trained on other fields.
pub fn lemma_2_5_check(
    w: &WeightField,
    params: &OperatorParams,
    v: &TestField,
    bc: BoundaryCondition,
    grid: &QuadratureGrid,
    c_fit: f64,
) -> Result<f64> {
    let s = lemma_2_5_sides(w, params, v, bc, grid)?;
    let r = s.rhs();
    if s.lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(if r > 0.0 { (s.lhs - c_fit * r).max(0.0) / r } else { f64::INFINITY })
}
