use serde::{Deserialize, Serialize};

use super::decompose::decompose;
use super::points::field_point;
use super::OperatorParams;
use crate::fields::{windowed_test_field, Interval, QuadratureGrid, Seed, TestField};
use crate::par;
use crate::weights::WeightField;
use crate::{Error, Result};

/// max over `points` of |θP(θ⁻¹z) − (P₁ + P₂ + Pᵣ)(z)| / (1 + Σ|components|).
pub fn verify_master_identity(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    points: &[Vec<f64>],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidGrid("no points given".into()));
    }
    let res = par::map_slice(points, |p| -> Result<f64> {
        let wp = w.point(p)?;
        Ok(decompose(w, params, &wp, &field_point(z, p)).relative_residual())
    });
    res.into_iter()
        .try_fold(0.0f64, |m, r| r.map(|x| m.max(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// |∫P₁(z)y − ∫zP₁(y)| / (‖P₁z‖‖y‖ + ‖z‖‖P₁y‖).
    pub sym_defect: f64,
    /// |∫P₂(z)y + ∫zP₂(y)| / (‖P₂z‖‖y‖ + ‖z‖‖P₂y‖).
    pub antisym_defect: f64,
    /// ∫zP₂(z) / (‖z‖‖P₂z‖).
    pub diagonal: f64,
}

/// Fields compactly supported in the open slab and the open spatial box,
/// windowed with power 5 so that every boundary term of the integration by
/// parts vanishes.
pub fn interior_pair(w: &WeightField, seeds: (Seed, Seed)) -> (TestField, TestField) {
    let d = &w.domain;
    let slab = d.slab();
    let m = 0.1 * slab.len();
    let slab = Interval::new(slab.lo + m, slab.hi - m);
    let supports: Vec<Interval> = d
        .lengths
        .iter()
        .map(|&l| Interval::new(0.1 * l, 0.9 * l))
        .collect();
    (
        windowed_test_field(seeds.0, slab, &supports, 5, d),
        windowed_test_field(seeds.1, slab, &supports, 5, d),
    )
}

pub fn verify_symmetry(
    w: &WeightField,
    params: &OperatorParams,
    seeds: (Seed, Seed),
    grid: &QuadratureGrid,
) -> Result<SymmetryReport> {
    let (z, y) = interior_pair(w, seeds);
    symmetry_of(w, params, &z, &y, grid)
}

pub fn symmetry_of(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    y: &TestField,
    grid: &QuadratureGrid,
) -> Result<SymmetryReport> {
    // probe one node up front so errors surface as values
    w.point(&grid.node(0))?;
    let v = grid.integrate_many(11, |p, out| {
        let Ok(wp) = w.point(p) else {
            out.iter_mut().for_each(|o| *o = f64::NAN);
            return;
        };
        let zp = field_point(z, p);
        let yp = field_point(y, p);
        let dz = decompose(w, params, &wp, &zp);
        let dy = decompose(w, params, &wp, &yp);
        out[0] = dz.p1 * yp.z;
        out[1] = zp.z * dy.p1;
        out[2] = dz.p2 * yp.z;
        out[3] = zp.z * dy.p2;
        out[4] = dz.p1 * dz.p1;
        out[5] = dy.p1 * dy.p1;
        out[6] = dz.p2 * dz.p2;
        out[7] = dy.p2 * dy.p2;
        out[8] = zp.z * zp.z;
        out[9] = yp.z * yp.z;
        out[10] = zp.z * dz.p2;
    });
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite integrand in symmetry check".into()));
    }
    let n = |i: usize| v[i].sqrt();
    let safe = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    Ok(SymmetryReport {
        sym_defect: safe((v[0] - v[1]).abs(), n(4) * n(9) + n(8) * n(5)),
        antisym_defect: safe((v[2] + v[3]).abs(), n(6) * n(9) + n(8) * n(7)),
        diagonal: safe(v[10].abs(), n(8) * n(6)),
    })
}
