use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fields::AxisRule;
use crate::numeric::bisect;
use crate::{Error, Result};

/// Largest supported mode count.
pub const MAX_MODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateBc {
    Clamped,
    Hinged,
}

/// One eigenmode of Δ² with the chosen boundary conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// 1-based mode number per axis.
    pub index: Vec<usize>,
    /// Wavenumber per axis: k_n/L for clamped beams, nπ/L for sines.
    pub wavenumbers: Vec<f64>,
    /// Eigenvalue of Δ².
    pub eigenvalue: f64,
    /// √eigenvalue, the undamped angular frequency.
    pub omega: f64,
    /// Clamped-beam shape constant σ; unused for sines.
    sigma: f64,
    /// Clamped root k_n (dimensionless); unused for sines.
    root: f64,
}

/// First N eigenmodes of Δ² on an interval or (hinged) rectangle, with
/// L²-orthonormal shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalBasis {
    pub bc: PlateBc,
    pub lengths: Vec<f64>,
    pub modes: Vec<Mode>,
}

/// n-th positive root of cosh k·cos k = 1, bracketed in (nπ, (n+1)π).
pub fn clamped_root(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::RootFinder("mode numbers start at 1".into()));
    }
    let a = n as f64 * PI;
    let b = a + PI;
    // cos k − sech k has the same roots and stays O(1)
    bisect(|k| k.cos() - 1.0 / k.cosh(), a, b, 1e-16)
        .ok_or_else(|| Error::RootFinder(format!("no sign change for mode {n}")))
}

/// σ = (cosh k − cos k)/(sinh k − sin k), evaluated without overflow.
fn clamped_sigma(k: f64) -> f64 {
    let e = (-k).exp();
    (1.0 + e * e - 2.0 * e * k.cos()) / (1.0 - e * e - 2.0 * e * k.sin())
}

/// cosh u − cos u − σ(sinh u − sin u) for u ∈ [0, k], with the growing
/// exponentials cancelled analytically.
fn clamped_shape(k: f64, sigma: f64, u: f64, deriv: usize) -> f64 {
    let e = (-k).exp();
    let grow = (k.cos() - k.sin() - e) / (1.0 - e * e - 2.0 * e * k.sin());
    let a = 0.5 * (1.0 + sigma);
    let ep = (u - k).exp();
    let em = (-u).exp();
    let (c, s) = (u.cos(), u.sin());
    let trig = match deriv % 4 {
        0 => -c + sigma * s,
        1 => s + sigma * c,
        2 => c - sigma * s,
        _ => -s - sigma * c,
    };
    let odd = if deriv.is_multiple_of(2) { 1.0 } else { -1.0 };
    odd * a * em + grow * ep + trig
}

/// Clamped-clamped beam modes on (0, L).
pub fn clamped_modes(n: usize, length: f64) -> Result<ModalBasis> {
    check_count(n)?;
    if !(length > 0.0) {
        return Err(Error::InvalidDomain(format!("length must be positive, got {length}")));
    }
    let modes = (1..=n)
        .map(|j| {
            let k = clamped_root(j)?;
            let beta = k / length;
            Ok(Mode {
                index: vec![j],
                wavenumbers: vec![beta],
                eigenvalue: beta.powi(4),
                omega: beta * beta,
                sigma: clamped_sigma(k),
                root: k,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModalBasis {
        bc: PlateBc::Clamped,
        lengths: vec![length],
        modes,
    })
}

/// Sine modes on an interval or rectangle, ordered by eigenvalue (ties by
/// index).
pub fn hinged_modes(n: usize, lengths: &[f64]) -> Result<ModalBasis> {
    check_count(n)?;
    if lengths.is_empty() || lengths.len() > 2 || lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidDomain(format!("need 1 or 2 positive lengths, got {lengths:?}")));
    }
    let mut idx: Vec<Vec<usize>> = if lengths.len() == 1 {
        (1..=n).map(|j| vec![j]).collect()
    } else {
        (1..=n).flat_map(|a| (1..=n).map(move |b| vec![a, b])).collect()
    };
    let eig = |ix: &[usize]| -> f64 {
        let s: f64 = ix
            .iter()
            .zip(lengths)
            .map(|(&j, &l)| (j as f64 * PI / l).powi(2))
            .sum();
        s * s
    };
    idx.sort_by(|a, b| eig(a).partial_cmp(&eig(b)).expect("finite").then(a.cmp(b)));
    idx.truncate(n);
    let modes = idx
        .into_iter()
        .map(|ix| {
            let ev = eig(&ix);
            Mode {
                wavenumbers: ix.iter().zip(lengths).map(|(&j, &l)| j as f64 * PI / l).collect(),
                index: ix,
                eigenvalue: ev,
                omega: ev.sqrt(),
                sigma: 0.0,
                root: 0.0,
            }
        })
        .collect();
    Ok(ModalBasis {
        bc: PlateBc::Hinged,
        lengths: lengths.to_vec(),
        modes,
    })
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        return Err(Error::Config(format!("mode count must be in 1..={MAX_MODES}, got {n}")));
    }
    Ok(())
}

impl ModalBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    /// `deriv`-th x-derivative of the 1-D factor of mode `i` on axis `axis`.
    fn factor(&self, i: usize, axis: usize, x: f64, deriv: usize) -> f64 {
        let m = &self.modes[i];
        let l = self.lengths[axis];
        let kw = m.wavenumbers[axis];
        match self.bc {
            PlateBc::Clamped => {
                clamped_shape(m.root, m.sigma, kw * x, deriv) * kw.powi(deriv as i32) / l.sqrt()
            }
            PlateBc::Hinged => {
                let a = kw * x;
                let v = match deriv % 4 {
                    0 => a.sin(),
                    1 => a.cos(),
                    2 => -a.sin(),
                    _ => -a.cos(),
                };
                v * kw.powi(deriv as i32) * (2.0 / l).sqrt()
            }
        }
    }

    /// Value of mode `i` at `x`.
    pub fn shape(&self, i: usize, x: &[f64]) -> f64 {
        (0..self.dim()).map(|a| self.factor(i, a, x[a], 0)).product()
    }

    /// Partial derivative of mode `i` with `orders[a]` derivatives on axis a.
    pub fn shape_partial(&self, i: usize, orders: &[usize], x: &[f64]) -> f64 {
        (0..self.dim()).map(|a| self.factor(i, a, x[a], orders[a])).product()
    }

    /// Composite Gauss rule per axis fine enough for products of two modes,
    /// with extra breakpoints (e.g. damping edges).
    pub fn rules(&self, extra: &[Vec<f64>]) -> Result<Vec<AxisRule>> {
        (0..self.dim())
            .map(|a| {
                let l = self.lengths[a];
                let kmax = self.modes.iter().map(|m| m.wavenumbers[a]).fold(0.0, f64::max);
                let panels = ((kmax * l / PI).ceil() as usize + 8).max(16);
                let mut bps: Vec<f64> = (0..=panels).map(|j| l * j as f64 / panels as f64).collect();
                if let Some(e) = extra.get(a) {
                    bps.extend(e.iter().filter(|&&x| x > 0.0 && x < l));
                }
                bps.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
                bps.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * l);
                AxisRule::from_breakpoints(&bps, 10)
            })
            .collect()
    }

    /// Tensor nodes and weights of [`Self::rules`].
    pub fn nodes(&self, extra: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let rules = self.rules(extra)?;
        let mut pts = vec![vec![]];
        let mut ws = vec![1.0];
        for r in &rules {
            let mut np = Vec::with_capacity(pts.len() * r.len());
            let mut nw = Vec::with_capacity(np.capacity());
            for (p, w) in pts.iter().zip(&ws) {
                for (x, v) in r.nodes.iter().zip(&r.weights) {
                    let mut q = p.clone();
                    q.push(*x);
                    np.push(q);
                    nw.push(w * v);
                }
            }
            pts = np;
            ws = nw;
        }
        Ok((pts, ws))
    }

    /// Gram matrix ∫ φ_i φ_j by quadrature.
    pub fn gram(&self) -> Result<nalgebra::DMatrix<f64>> {
        let (pts, ws) = self.nodes(&[])?;
        let phi = self.table(&pts);
        Ok(weighted_gram(&phi, &ws))
    }

    /// Mode values at the points: rows are points, columns modes.
    pub fn table(&self, pts: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(pts.len(), self.len(), |r, i| self.shape(i, &pts[r]))
    }

    /// L² projections ∫ f φ_i.
    pub fn project<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<Vec<f64>> {
        let (pts, ws) = self.nodes(&[])?;
        let fw: Vec<f64> = pts.iter().zip(&ws).map(|(p, w)| w * f(p)).collect();
        Ok((0..self.len())
            .map(|i| {
                crate::numeric::neumaier_sum(pts.iter().zip(&fw).map(|(p, v)| v * self.shape(i, p)))
            })
            .collect())
    }
}

/// Φᵀ diag(w) Φ.
pub(crate) fn weighted_gram(phi: &nalgebra::DMatrix<f64>, w: &[f64]) -> nalgebra::DMatrix<f64> {
    let mut scaled = phi.clone();
    for (r, &wr) in w.iter().enumerate() {
        scaled.row_mut(r).scale_mut(wr);
    }
    let g = phi.transpose() * scaled;
    (&g + g.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_clamped_root() {
        let k = clamped_root(1).unwrap();
        assert!((k - 4.730040744862704).abs() < 1e-12);
        assert!((k.cosh() * k.cos() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn clamped_shape_meets_boundary_conditions() {
        let b = clamped_modes(30, 1.0).unwrap();
        for i in [0, 5, 29] {
            for x in [0.0, 1.0] {
                assert!(b.shape(i, &[x]).abs() < 1e-9, "{i} {x}");
                let d = b.shape_partial(i, &[1], &[x]);
                assert!(d.abs() < 1e-9 * b.modes[i].wavenumbers[0], "{i} {x} {d}");
            }
        }
    }

    #[test]
    fn hinged_eigenvalues() {
        let b = hinged_modes(3, &[PI]).unwrap();
        assert_eq!(b.modes[0].eigenvalue, 1.0);
        assert!((b.modes[1].eigenvalue - 16.0).abs() < 1e-12);
    }
}
