use serde::{Deserialize, Serialize};

use crate::fields::{Interval, SpaceTimeDomain};
use crate::jet::{poly_taylor, series_exp, series_mul, Jet, JetSpace};
use crate::{Error, Result};

/// η(x) = x(L−x)·exp(κ(x−x*)) on (0, L); its only critical point is x*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eta1d {
    pub l: f64,
    pub xstar: f64,
    pub kappa: f64,
}

impl Eta1d {
    pub fn new(l: f64, xstar: f64) -> Self {
        // stationarity of log η: 1/x − 1/(L−x) + κ = 0 at x*
        let kappa = (2.0 * xstar - l) / (xstar * (l - xstar));
        Eta1d { l, xstar, kappa }
    }

    pub fn taylor(&self, x: f64, n: usize) -> Vec<f64> {
        let p = poly_taylor(&[0.0, self.l, -1.0], x, n);
        let e = series_exp(&poly_taylor(
            &[-self.kappa * self.xstar, self.kappa],
            x,
            n,
        ));
        series_mul(&p, &e, n)
    }

    pub fn value(&self, x: f64) -> f64 {
        x * (self.l - x) * (self.kappa * (x - self.xstar)).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        ((self.l - 2.0 * x) + self.kappa * x * (self.l - x)) * (self.kappa * (x - self.xstar)).exp()
    }

    pub fn max(&self) -> f64 {
        self.value(self.xstar)
    }
}

/// Spatial function with η > 0 inside, η = 0 on ∂Ω and |∇η| > 0 outside ω0.
/// In two dimensions it is the product of the per-axis functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaField {
    pub axes: Vec<Eta1d>,
    pub omega0: Vec<Interval>,
    pub omega: Vec<Interval>,
}

impl EtaField {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(e, &xi)| e.value(xi)).product()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                self.axes
                    .iter()
                    .zip(x)
                    .enumerate()
                    .map(|(j, (e, &xj))| if i == j { e.derivative(xj) } else { e.value(xj) })
                    .product()
            })
            .collect()
    }

    /// ‖η‖_∞ = η(x*).
    pub fn max(&self) -> f64 {
        self.axes.iter().map(|e| e.max()).product()
    }

    pub fn critical_point(&self) -> Vec<f64> {
        self.axes.iter().map(|e| e.xstar).collect()
    }

    /// Jet in a space whose variable 0 is time (unused) and whose variables
    /// 1.. are the spatial coordinates; `p` includes the time coordinate.
    pub fn jet<'a>(&self, sp: &'a JetSpace, p: &[f64]) -> Jet<'a> {
        let n = sp.degree() + 1;
        let mut one = vec![0.0; n];
        one[0] = 1.0;
        let xs: Vec<Vec<f64>> = self
            .axes
            .iter()
            .enumerate()
            .map(|(i, e)| e.taylor(p[i + 1], n))
            .collect();
        let mut series: Vec<&[f64]> = vec![&one];
        series.extend(xs.iter().map(|v| v.as_slice()));
        sp.separable(&series)
    }
}

/// η with critical point at the centre of ω0 on every axis.
pub fn build_eta(domain: &SpaceTimeDomain, omega0: &[Interval], omega: &[Interval]) -> Result<EtaField> {
    let xstar: Vec<f64> = omega0.iter().map(|i| i.mid()).collect();
    build_eta_at(domain, omega0, omega, &xstar)
}

/// η with a chosen critical point `xstar ∈ ω0`.
pub fn build_eta_at(
    domain: &SpaceTimeDomain,
    omega0: &[Interval],
    omega: &[Interval],
    xstar: &[f64],
) -> Result<EtaField> {
    let dim = domain.dim();
    if omega0.len() != dim || omega.len() != dim || xstar.len() != dim {
        return Err(Error::Eta("ω0, ω and x* must match the dimension".into()));
    }
    for i in 0..dim {
        let l = domain.lengths[i];
        if !omega0[i].compactly_inside(&omega[i]) {
            return Err(Error::Eta(format!("closure of ω0 not inside ω on axis {i}")));
        }
        if omega[i].lo < 0.0 || omega[i].hi > l {
            return Err(Error::Eta(format!("ω leaves Ω on axis {i}")));
        }
        if !omega0[i].contains(xstar[i]) {
            return Err(Error::Eta(format!("x* not inside ω0 on axis {i}")));
        }
    }
    let eta = EtaField {
        axes: (0..dim).map(|i| Eta1d::new(domain.lengths[i], xstar[i])).collect(),
        omega0: omega0.to_vec(),
        omega: omega.to_vec(),
    };
    check_eta(&eta, &domain.lengths)?;
    Ok(eta)
}

/// Dense-sample check of the η invariants. Corners of a rectangle are
/// skipped: any C¹ function vanishing on the boundary has ∇η = 0 there.
pub fn check_eta(eta: &EtaField, lengths: &[f64]) -> Result<()> {
    let n = if eta.dim() == 1 { 4000 } else { 200 };
    let dim = eta.dim();
    let total = (n + 1usize).pow(dim as u32);
    let scale = eta.max() / lengths.iter().cloned().fold(f64::MIN, f64::max);
    for idx in 0..total {
        let mut x = vec![0.0; dim];
        let mut r = idx;
        let mut on_boundary = 0;
        for i in 0..dim {
            let k = r % (n + 1);
            r /= n + 1;
            x[i] = lengths[i] * k as f64 / n as f64;
            if k == 0 || k == n {
                on_boundary += 1;
            }
        }
        let v = eta.value(&x);
        if on_boundary > 0 {
            if v.abs() > 1e-14 * eta.max() {
                return Err(Error::Eta(format!("η ≠ 0 on the boundary at {x:?}")));
            }
        } else if v <= 0.0 {
            return Err(Error::Eta(format!("η ≤ 0 inside at {x:?}")));
        }
        if on_boundary == dim && dim > 1 {
            continue;
        }
        let in_omega0 = x.iter().zip(&eta.omega0).all(|(&xi, iv)| iv.contains(xi));
        if !in_omega0 {
            let g2: f64 = eta.gradient(&x).iter().map(|g| g * g).sum();
            if g2.sqrt() <= 1e-10 * scale {
                return Err(Error::Eta(format!("critical point outside ω0 near {x:?}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_parabola() {
        let e = Eta1d::new(1.0, 0.5);
        assert_eq!(e.kappa, 0.0);
        assert_eq!(e.value(0.0), 0.0);
        assert_eq!(e.value(1.0), 0.0);
        assert_eq!(e.derivative(0.5), 0.0);
    }

    #[test]
    fn shifted_critical_point() {
        let e = Eta1d::new(1.0, 0.7);
        assert!((e.kappa - 40.0 / 21.0).abs() < 1e-14);
        assert!(e.derivative(0.7).abs() < 1e-15);
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let eta = build_eta_at(
            &d,
            &[Interval::new(0.6, 0.8)],
            &[Interval::new(0.5, 0.9)],
            &[0.7],
        )
        .unwrap();
        assert_eq!(eta.critical_point(), vec![0.7]);
    }

    #[test]
    fn rejects_bad_regions() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        assert!(build_eta(&d, &[Interval::new(0.3, 0.7)], &[Interval::new(0.4, 0.6)]).is_err());
        assert!(build_eta(&d, &[Interval::new(0.3, 0.7)], &[Interval::new(0.2, 1.2)]).is_err());
    }

    #[test]
    fn two_dimensional_product() {
        let d = SpaceTimeDomain::new(0.0, 1.0, &[1.0, 1.0]).unwrap();
        let w0 = Interval::new(0.45, 0.55);
        let w = Interval::new(0.4, 0.6);
        let eta = build_eta(&d, &[w0, w0], &[w, w]).unwrap();
        assert!((eta.max() - 1.0 / 16.0).abs() < 1e-15);
        let sp = JetSpace::new(3, 2);
        let j = eta.jet(&sp, &[0.0, 0.3, 0.8]);
        let g = eta.gradient(&[0.3, 0.8]);
        assert!((j.partial(&[0, 1, 0]) - g[0]).abs() < 1e-15);
        assert!((j.partial(&[0, 0, 1]) - g[1]).abs() < 1e-15);
    }
}
