use serde::{Deserialize, Serialize};

use super::domain::SpaceTimeDomain;
use crate::numeric::{gauss_legendre, Neumaier};
use crate::{par, Error, Result};

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 10;

/// Composite Gauss–Legendre rule on one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRule {
    pub breakpoints: Vec<f64>,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn check_order(order: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidGrid(format!(
            "order {order} outside [{MIN_ORDER}, {MAX_ORDER}]"
        )));
    }
    Ok(())
}

impl AxisRule {
    pub fn uniform(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidGrid("panel count must be >= 1".into()));
        }
        let bps: Vec<f64> = (0..=panels)
            .map(|i| {
                if i == panels {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / panels as f64
                }
            })
            .collect();
        Self::from_breakpoints(&bps, order)
    }

    /// Rule with one Gauss panel between consecutive breakpoints.
    pub fn from_breakpoints(bps: &[f64], order: usize) -> Result<Self> {
        check_order(order)?;
        if bps.len() < 2 {
            return Err(Error::InvalidGrid("need at least two breakpoints".into()));
        }
        if bps.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("breakpoints must increase".into()));
        }
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((bps.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in bps.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Ok(AxisRule {
            breakpoints: bps.to_vec(),
            order,
            nodes,
            weights,
        })
    }

    /// Uniform panels plus geometric clusters around each focus point: panel
    /// widths grow from `h_min` by `ratio` until they reach the base width.
    /// Extra breakpoints in `fixed` (clipped to the axis) are always kept.
    pub fn graded(
        lo: f64,
        hi: f64,
        base_panels: usize,
        order: usize,
        foci: &[f64],
        fixed: &[f64],
        h_min: f64,
        ratio: f64,
    ) -> Result<Self> {
        if base_panels == 0 {
            return Err(Error::InvalidGrid("panel count must be >= 1".into()));
        }
        if !(h_min > 0.0 && ratio > 1.0) {
            return Err(Error::InvalidGrid("grading needs h_min > 0, ratio > 1".into()));
        }
        let h = (hi - lo) / base_panels as f64;
        let mut pts: Vec<f64> = (0..=base_panels)
            .map(|i| lo + h * i as f64)
            .collect();
        *pts.last_mut().expect("nonempty") = hi;
        for &f in fixed {
            if f > lo && f < hi {
                pts.push(f);
            }
        }
        for &f in foci {
            if !(f >= lo && f <= hi) {
                continue;
            }
            pts.push(f);
            let mut step = h_min;
            let mut d = h_min;
            while d < h {
                for p in [f - d, f + d] {
                    if p > lo && p < hi {
                        pts.push(p);
                    }
                }
                step *= ratio;
                d += step;
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        let tol = 1e-13 * (hi - lo);
        let mut bps: Vec<f64> = Vec::with_capacity(pts.len());
        for p in pts {
            match bps.last() {
                Some(&q) if p - q <= tol => {}
                _ => bps.push(p),
            }
        }
        // keep the exact endpoint even if a nearby point was merged into it
        if let Some(last) = bps.last_mut() {
            *last = hi;
        }
        Self::from_breakpoints(&bps, order)
    }

    /// Same breakpoints with every panel split into `factor` equal panels.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidGrid("refinement factor must be >= 1".into()));
        }
        let mut bps = Vec::with_capacity((self.breakpoints.len() - 1) * factor + 1);
        for w in self.breakpoints.windows(2) {
            for j in 0..factor {
                bps.push(w[0] + (w[1] - w[0]) * j as f64 / factor as f64);
            }
        }
        bps.push(*self.breakpoints.last().expect("nonempty"));
        Self::from_breakpoints(&bps, self.order)
    }

    /// Drops the first and last panel.
    pub fn without_end_panels(&self) -> Result<Self> {
        let n = self.breakpoints.len();
        if n < 4 {
            return Err(Error::InvalidGrid("too few panels to drop the ends".into()));
        }
        Self::from_breakpoints(&self.breakpoints[1..n - 1], self.order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.total()
    }
}

/// Tensor-product grid; axis 0 is time, then the spatial axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub axes: Vec<AxisRule>,
}

/// Uniform tensor grid with `res[a]` panels of `order` Gauss points on axis
/// `a` (0 = time).
pub fn make_grid(domain: &SpaceTimeDomain, res: &[usize], order: usize) -> Result<QuadratureGrid> {
    let naxes = domain.dim() + 1;
    if res.len() != naxes {
        return Err(Error::InvalidGrid(format!(
            "expected {naxes} resolutions, got {}",
            res.len()
        )));
    }
    let axes = (0..naxes)
        .map(|a| {
            let (lo, hi) = domain.axis_bounds(a);
            AxisRule::uniform(lo, hi, res[a], order)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadratureGrid { axes })
}

/// Σ wᵢ·valueᵢ over the grid nodes in row-major order.
pub fn integrate(values: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    let n = grid.node_count();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    let mut acc = Neumaier::new();
    let mut idx = vec![0usize; grid.axes.len()];
    for v in values {
        acc.add(grid.weight_at(&idx) * v);
        grid.advance(&mut idx);
    }
    Ok(acc.total())
}

impl QuadratureGrid {
    pub fn from_axes(axes: Vec<AxisRule>) -> Self {
        QuadratureGrid { axes }
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    fn weight_at(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.weights[i])
            .product()
    }

    fn advance(&self, idx: &mut [usize]) {
        for a in (0..idx.len()).rev() {
            idx[a] += 1;
            if idx[a] < self.axes[a].len() {
                return;
            }
            idx[a] = 0;
        }
    }

    /// Coordinates of node `i` (row-major, time outermost).
    pub fn node(&self, mut i: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes.len()];
        for a in (0..self.axes.len()).rev() {
            let n = self.axes[a].len();
            p[a] = self.axes[a].nodes[i % n];
            i /= n;
        }
        p
    }

    pub fn weights_total(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.weights.iter().sum::<f64>())
            .product()
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Ok(QuadratureGrid {
            axes: self
                .axes
                .iter()
                .map(|a| a.refined(factor))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// ∫ f over the grid. Rows (fixed time node) are summed in parallel and
    /// combined in index order, so the result does not depend on the worker
    /// count.
    pub fn integrate_fn<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        self.integrate_many(1, |p, out| out[0] = f(p))[0]
    }

    /// Integrals of `k` quantities at once; `f(p, out)` writes the `k`
    /// integrand values at node `p`.
    pub fn integrate_many<F>(&self, k: usize, f: F) -> Vec<f64>
    where
        F: Fn(&[f64], &mut [f64]) + Sync + Send,
    {
        let t = &self.axes[0];
        let inner = QuadratureGrid {
            axes: self.axes[1..].to_vec(),
        };
        let m = inner.node_count();
        let rows = par::map_range(t.len(), |i| {
            let mut acc = vec![Neumaier::new(); k];
            let mut out = vec![0.0; k];
            let mut p = vec![0.0; self.axes.len()];
            p[0] = t.nodes[i];
            let mut idx = vec![0usize; inner.axes.len()];
            for _ in 0..m {
                for (a, &j) in idx.iter().enumerate() {
                    p[a + 1] = inner.axes[a].nodes[j];
                }
                out.iter_mut().for_each(|o| *o = 0.0);
                f(&p, &mut out);
                let w = inner.weight_at(&idx);
                for (a, o) in acc.iter_mut().zip(&out) {
                    a.add(w * o);
                }
                inner.advance(&mut idx);
            }
            acc.iter().map(|a| t.weights[i] * a.total()).collect::<Vec<_>>()
        });
        let mut acc = vec![Neumaier::new(); k];
        for r in rows {
            for (a, v) in acc.iter_mut().zip(r) {
                a.add(v);
            }
        }
        acc.iter().map(|a| a.total()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::domain::SpaceTimeDomain;

    #[test]
    fn unit_square_two_points() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let g = make_grid(&d, &[1, 1], 2).unwrap();
        assert_eq!(g.node_count(), 4);
        assert!((g.weights_total() - 1.0).abs() < 1e-15);
        let ones = vec![1.0; 4];
        assert!((integrate(&ones, &g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        let r = AxisRule::uniform(0.0, 1.0, 8, 4).unwrap();
        let e = r.integrate(f64::exp);
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let r = AxisRule::uniform(0.0, 1.0, 1, 3).unwrap();
        assert!((r.integrate(|x| x.powi(4)) - 0.2).abs() < 1e-14);
        let r = AxisRule::uniform(0.0, 1.0, 4, 8).unwrap();
        let s = r.integrate(|x| (std::f64::consts::PI * x).sin().powi(2));
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        assert!(make_grid(&d, &[0, 1], 4).is_err());
        assert!(make_grid(&d, &[1, 1], 1).is_err());
        assert!(make_grid(&d, &[1, 1], 11).is_err());
        let g = make_grid(&d, &[1, 1], 2).unwrap();
        assert!(matches!(
            integrate(&[1.0; 3], &g),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn graded_rule_integrates_a_narrow_gaussian() {
        let sigma = 1e-3;
        let r = AxisRule::graded(0.0, 1.0, 10, 6, &[0.37], &[], sigma / 8.0, 1.4).unwrap();
        let v = r.integrate(|x| (-((x - 0.37) / sigma).powi(2)).exp());
        let exact = sigma * std::f64::consts::PI.sqrt();
        assert!(((v - exact) / exact).abs() < 1e-10, "{v} vs {exact}");
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn integrate_fn_matches_integrate() {
        let d = SpaceTimeDomain::new(-1.0, 1.0, &[1.0, 2.0]).unwrap();
        let g = make_grid(&d, &[2, 3, 2], 3).unwrap();
        let f = |p: &[f64]| p[0] * p[0] + p[1] * p[2];
        let vals: Vec<f64> = (0..g.node_count()).map(|i| f(&g.node(i))).collect();
        let a = integrate(&vals, &g).unwrap();
        let b = g.integrate_fn(f);
        // ∫∫∫ s² + x y = (2/3)(2) + 2·(1/2)(2) = 4/3 + 2
        assert!((a - (4.0 / 3.0 + 2.0)).abs() < 1e-13);
        assert!((a - b).abs() < 1e-13);
    }
}
