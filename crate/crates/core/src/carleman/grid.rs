use crate::fields::{AxisRule, Interval, QuadratureGrid};
use crate::weights::{Family, WeightField};
use crate::Result;

const GRADING: f64 = 1.3;

/// Time at which θ peaks.
pub fn peak_time(w: &WeightField) -> f64 {
    let (b1, b2) = (w.domain.b1, w.domain.b2);
    match &w.spec.family {
        Family::I { .. } => 0.5 * (b1 + b2),
        Family::II { s0, .. } => s0.clamp(b1, b2),
        Family::III { .. } => 0.0f64.clamp(b1, b2),
    }
}

/// Smallest length scales of θ² in s and x near its peak and at the window
/// edges: 1/|∂(2ℓ)| and 1/√|∂²(2ℓ)|.
fn theta_scales(w: &WeightField, omega: Interval) -> Result<(f64, f64)> {
    let l = w.lambda();
    let sp = peak_time(w);
    let t = w.t_series(sp, 3)?;
    let mut hs = f64::INFINITY;
    let mut hx = f64::INFINITY;
    let inv = |d: f64| if d == 0.0 { f64::INFINITY } else { 1.0 / d.abs() };
    for x in [w.eta.critical_point()[0], omega.lo, omega.hi] {
        let (xi, _) = w.x_series_1d(x, 3);
        hs = hs.min(inv(4.0 * l * t[2] * xi[0]).sqrt()).min(inv(2.0 * l * t[1] * xi[0]));
        hx = hx.min(inv(4.0 * l * t[0] * xi[2]).sqrt()).min(inv(2.0 * l * t[0] * xi[1]));
    }
    Ok((hs, hx))
}

/// Tensor grid for Carleman integrals: `base_panels` uniform panels per axis,
/// geometric clustering around the θ peak and the window edges, and
/// breakpoints at the window edges so the indicator of ω is integrated
/// exactly.
pub fn carleman_grid(w: &WeightField, omega: Interval, base_panels: usize, order: usize) -> Result<QuadratureGrid> {
    let (hs, hx) = theta_scales(w, omega)?;
    let (b1, b2) = (w.domain.b1, w.domain.b2);
    let len = w.domain.lengths[0];
    let clamp = |h: f64, span: f64| (0.25 * h).clamp(1e-10 * span, span / base_panels.max(1) as f64);
    let s_axis = AxisRule::graded(b1, b2, base_panels, order, &[peak_time(w)], &[], clamp(hs, b2 - b1), GRADING)?;
    let foci = [w.eta.critical_point()[0], omega.lo, omega.hi];
    let x_axis = AxisRule::graded(0.0, len, base_panels, order, &foci, &[omega.lo, omega.hi], clamp(hx, len), GRADING)?;
    Ok(QuadratureGrid::from_axes(vec![s_axis, x_axis]))
}
