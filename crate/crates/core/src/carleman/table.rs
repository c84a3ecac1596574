//! Tabulated evaluation of separable weights and fields on a 1-D tensor grid,
//! with integrals accumulated in log scale so that θ² never has to be formed.

use crate::fields::{QuadratureGrid, TestField};
use crate::par;
use crate::weights::WeightField;
use crate::Result;

/// `s·e^m`, grown so that `s` stays O(1).
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogAcc {
    m: f64,
    s: f64,
}

impl Default for LogAcc {
    fn default() -> Self {
        LogAcc {
            m: f64::NEG_INFINITY,
            s: 0.0,
        }
    }
}

impl LogAcc {
    /// Adds `q·e^e`.
    pub(crate) fn add(&mut self, e: f64, q: f64) {
        if q == 0.0 || e == f64::NEG_INFINITY {
            return;
        }
        if e > self.m {
            self.s = self.s * (self.m - e).exp() + q;
            self.m = e;
        } else {
            self.s += q * (e - self.m).exp();
        }
    }

    pub(crate) fn merge(&mut self, o: &LogAcc) {
        self.add(o.m, o.s);
    }

    /// log|value|, or −∞ for zero.
    pub(crate) fn log_abs(&self) -> f64 {
        if self.s == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m + self.s.abs().ln()
        }
    }

    /// value·e^{−r}.
    pub(crate) fn scaled(&self, r: f64) -> f64 {
        if self.s == 0.0 {
            0.0
        } else {
            self.s * (self.m - r).exp()
        }
    }
}

/// Everything an integrand may need at one node, with θ factored out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub x: f64,
    pub phi: f64,
    pub ell_s: f64,
    pub ell_x: f64,
    pub ell_xx: f64,
    /// `v[a][b]` = ∂s^a ∂x^b v.
    pub v: [[f64; 5]; 3],
}

/// Per-axis tables for one (weight, field) pair.
pub(crate) struct Tables {
    lambda: f64,
    // per time node: t, t′
    t: Vec<[f64; 2]>,
    // per space node: X, X′, X″ with X = e^{μη̂} − δ, and e^{μη̂}
    xw: Vec<([f64; 3], f64)>,
    // per term: coefficient, time derivs per time node, space derivs per space node
    terms: Vec<(f64, Vec<[f64; 3]>, Vec<[f64; 5]>)>,
    pub(crate) x_nodes: Vec<f64>,
}

impl Tables {
    pub(crate) fn new(w: &WeightField, v: &TestField, s_nodes: &[f64], x_nodes: &[f64]) -> Result<Tables> {
        let t = s_nodes
            .iter()
            .map(|&s| {
                let c = w.t_series(s, 2)?;
                Ok([c[0], c[1]])
            })
            .collect::<Result<Vec<_>>>()?;
        let xw = x_nodes
            .iter()
            .map(|&x| {
                let (xi, phi) = w.x_series_1d(x, 3);
                ([xi[0], xi[1], 2.0 * xi[2]], phi[0])
            })
            .collect();
        let terms = v
            .terms
            .iter()
            .map(|term| {
                let td = s_nodes
                    .iter()
                    .map(|&s| {
                        let d = term.time.derivs(s, 3);
                        [d[0], d[1], d[2]]
                    })
                    .collect();
                let xd = x_nodes
                    .iter()
                    .map(|&x| {
                        let d = term.space[0].derivs(x, 5);
                        [d[0], d[1], d[2], d[3], d[4]]
                    })
                    .collect();
                (term.coef, td, xd)
            })
            .collect();
        Ok(Tables {
            lambda: w.lambda(),
            t,
            xw,
            terms,
            x_nodes: x_nodes.to_vec(),
        })
    }

    /// Node data and log θ at `(i, j)`.
    pub(crate) fn node(&self, i: usize, j: usize) -> (Node, f64) {
        let [t0, t1] = self.t[i];
        let ([x0, x1, x2], ex) = self.xw[j];
        let l = self.lambda;
        let mut v = [[0.0; 5]; 3];
        for (c, td, xd) in &self.terms {
            let (a, b) = (&td[i], &xd[j]);
            for (p, row) in v.iter_mut().enumerate() {
                let ca = c * a[p];
                for (q, val) in row.iter_mut().enumerate() {
                    *val += ca * b[q];
                }
            }
        }
        let node = Node {
            x: self.x_nodes[j],
            phi: t0 * ex,
            ell_s: l * t1 * x0,
            ell_x: l * t0 * x1,
            ell_xx: l * t0 * x2,
            v,
        };
        (node, l * t0 * x0)
    }
}

/// k integrals `∫ θ²·q_k` over a 1-D tensor grid, as log-scale accumulators.
/// Time rows run in parallel and are merged in row order.
pub(crate) fn log_integrate<F>(tab: &Tables, grid: &QuadratureGrid, k: usize, f: F) -> Vec<LogAcc>
where
    F: Fn(&Node, &mut [f64]) + Sync + Send,
{
    let (ts, xs) = (&grid.axes[0], &grid.axes[1]);
    let rows = par::map_range(ts.len(), |i| {
        let mut acc = vec![LogAcc::default(); k];
        let mut q = vec![0.0; k];
        for j in 0..xs.len() {
            let (node, ell) = tab.node(i, j);
            q.iter_mut().for_each(|x| *x = 0.0);
            f(&node, &mut q);
            let e = 2.0 * ell + (ts.weights[i] * xs.weights[j]).ln();
            for (a, &qv) in acc.iter_mut().zip(&q) {
                a.add(e, qv);
            }
        }
        acc
    });
    let mut total = vec![LogAcc::default(); k];
    for r in rows {
        for (t, a) in total.iter_mut().zip(&r) {
            t.merge(a);
        }
    }
    total
}

/// Line integrals `∫ θ²·q_k ds` at fixed x nodes (the tables' `x_nodes`),
/// with the given time weights.
pub(crate) fn log_integrate_lines<F>(tab: &Tables, time_weights: &[f64], k: usize, f: F) -> Vec<LogAcc>
where
    F: Fn(&Node, &mut [f64]),
{
    let mut acc = vec![LogAcc::default(); k];
    let mut q = vec![0.0; k];
    for (i, &wt) in time_weights.iter().enumerate() {
        for j in 0..tab.x_nodes.len() {
            let (node, ell) = tab.node(i, j);
            q.iter_mut().for_each(|x| *x = 0.0);
            f(&node, &mut q);
            let e = 2.0 * ell + wt.ln();
            for (a, &qv) in acc.iter_mut().zip(&q) {
                a.add(e, qv);
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_accumulator_matches_plain_sum() {
        let mut a = LogAcc::default();
        let mut plain = 0.0;
        for (e, q) in [(0.5, 2.0), (3.0, 0.25), (-1.0, 4.0), (2.0, 1.0)] {
            a.add(e, q);
            plain += q * f64::exp(e);
        }
        assert!((a.scaled(0.0) - plain).abs() <= 1e-14 * plain);
        assert!((a.log_abs() - plain.ln()).abs() <= 1e-14);
        let mut b = LogAcc::default();
        b.add(1000.0, 1.0);
        b.add(1001.0, 1.0);
        assert!((b.log_abs() - (1000.0 + (1.0 + 1f64.exp()).ln())).abs() < 1e-12);
    }
}
