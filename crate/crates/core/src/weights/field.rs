use serde::{Deserialize, Serialize};

use super::eta::EtaField;
use super::spec::{Family, WeightSpec};
use crate::fields::SpaceTimeDomain;
use crate::jet::{poly_taylor, series_exp, series_powf, Jet, JetSpace};
use crate::rect::Rect;
use crate::{Error, Result};

/// A weight θ = e^ℓ, ℓ = λξ, built from a [`WeightSpec`] and a spatial η.
///
/// Every family factors as φ = T(s)·exp(μ·η̂(x)) and ξ = T(s)·(exp(μη̂) − δ),
/// where η̂ is the spatial function entering the weight (η for family I,
/// η/‖η‖ for family III, |x − x0|² for family II) and δ = 2e^{μ‖η‖} for
/// family I, 0 otherwise. Scaled quantities use log θ̃ = ℓ − ℓ_max with ℓ_max
/// an upper bound of ℓ on the slab, so θ̃ ∈ (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    pub spec: WeightSpec,
    pub eta: EtaField,
    pub domain: SpaceTimeDomain,
    /// log θ_max.
    pub ell_max: f64,
    delta: f64,
    eta_scale: f64,
}

/// Jets of the weight at one point of a space whose variable 0 is time.
pub struct WeightJets<'a> {
    pub eta: Jet<'a>,
    pub phi: Jet<'a>,
    pub ell: Jet<'a>,
    /// ℓ − ℓ_max.
    pub log_theta: Jet<'a>,
}

/// Pointwise weight bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub phi: f64,
    pub phi_s: f64,
    pub phi_ss: f64,
    pub ell: f64,
    pub log_theta: f64,
    pub ell_s: f64,
    pub ell_ss: f64,
    pub grad_ell: Vec<f64>,
    pub hess_ell: Vec<Vec<f64>>,
    pub lap_ell: f64,
    pub grad_lap_ell: Vec<f64>,
    pub bilap_ell: f64,
    pub grad_eta: Vec<f64>,
    pub hess_eta: Vec<Vec<f64>>,
    /// A = |∇ℓ|².
    pub a: f64,
    /// Λ = |∇ℓ|² − Δℓ.
    pub cap_lambda: f64,
}

pub fn build_weight(spec: &WeightSpec, eta: &EtaField, domain: &SpaceTimeDomain) -> Result<WeightField> {
    spec.validate()?;
    if eta.dim() != domain.dim() {
        return Err(Error::InvalidWeight("η and domain dimensions differ".into()));
    }
    let mu = spec.mu.0;
    let lambda = spec.lambda.0;
    let emax = eta.max();
    let (delta, eta_scale) = match &spec.family {
        Family::I { .. } => (2.0 * (mu * emax).exp(), 1.0),
        Family::II { x0, .. } => {
            if x0.len() != domain.dim() {
                return Err(Error::InvalidWeight("x0 has the wrong dimension".into()));
            }
            let inside = x0
                .iter()
                .zip(&domain.lengths)
                .all(|(&x, &l)| (0.0..=l).contains(&x));
            if inside {
                return Err(Error::InvalidWeight(format!("x0 = {x0:?} lies in the closed domain")));
            }
            (0.0, 1.0)
        }
        Family::III { .. } => (0.0, 1.0 / emax),
    };
    let mut w = WeightField {
        spec: spec.clone(),
        eta: eta.clone(),
        domain: domain.clone(),
        ell_max: 0.0,
        delta,
        eta_scale,
    };
    if lambda != 0.0 {
        w.ell_max = w.ell_bound();
        if !w.ell_max.is_finite() {
            return Err(Error::WeightOverflow);
        }
    }
    Ok(w)
}

impl WeightField {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn lambda(&self) -> f64 {
        self.spec.lambda.0
    }

    pub fn mu(&self) -> f64 {
        self.spec.mu.0
    }

    /// The same weight normalized by a different θ_max.
    pub fn with_log_theta_max(&self, ell_max: f64) -> WeightField {
        WeightField {
            ell_max,
            ..self.clone()
        }
    }

    fn ell_bound(&self) -> f64 {
        let (lambda, mu) = (self.lambda(), self.mu());
        let (b1, b2) = (self.domain.b1, self.domain.b2);
        match &self.spec.family {
            Family::I { k } => {
                let half = 0.5 * (b2 - b1);
                -lambda * (mu * self.eta.max()).exp() * half.powf(-2.0 * k)
            }
            Family::II { s0, c, x0 } => {
                let sc = s0.clamp(b1, b2);
                let tmax = [b1, b2, sc]
                    .iter()
                    .map(|s| -mu * c * (s - s0).powi(2))
                    .fold(f64::MIN, f64::max);
                // |x − x0|² is maximized at a box vertex
                let xmax: f64 = x0
                    .iter()
                    .zip(&self.domain.lengths)
                    .map(|(&x, &l)| (x * x).max((l - x) * (l - x)))
                    .sum();
                lambda * (tmax + mu * xmax).exp()
            }
            Family::III { b } => {
                let smin = if b1 <= 0.0 && b2 >= 0.0 { 0.0 } else { b1.abs().min(b2.abs()) };
                lambda * (mu * (1.0 + b * b - smin * smin)).exp()
            }
        }
    }

    /// Taylor coefficients of T(s).
    pub fn t_series(&self, s: f64, n: usize) -> Result<Vec<f64>> {
        let mu = self.mu();
        match &self.spec.family {
            Family::I { k } => {
                let (b1, b2) = (self.domain.b1, self.domain.b2);
                if !(s > b1 && s < b2) {
                    return Err(Error::WeightSingular(s));
                }
                let g = poly_taylor(&[-b1 * b2, b1 + b2, -1.0], s, n);
                Ok(series_powf(&g, -k))
            }
            Family::II { s0, c, .. } => {
                let m = mu * c;
                Ok(series_exp(&poly_taylor(&[-m * s0 * s0, 2.0 * m * s0, -m], s, n)))
            }
            Family::III { b } => Ok(series_exp(&poly_taylor(&[mu * b * b, 0.0, -mu], s, n))),
        }
    }

    /// Taylor coefficients of η̂ along a 1-D axis.
    pub fn eta_series_1d(&self, x: f64, n: usize) -> Vec<f64> {
        match &self.spec.family {
            Family::II { x0, .. } => poly_taylor(&[x0[0] * x0[0], -2.0 * x0[0], 1.0], x, n),
            _ => self.eta.axes[0]
                .taylor(x, n)
                .into_iter()
                .map(|c| c * self.eta_scale)
                .collect(),
        }
    }

    /// Taylor coefficients of exp(μη̂) − δ along a 1-D axis, and of exp(μη̂).
    pub fn x_series_1d(&self, x: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let e: Vec<f64> = self.eta_series_1d(x, n).iter().map(|c| c * self.mu()).collect();
        let phi = series_exp(&e);
        let mut xi = phi.clone();
        xi[0] -= self.delta;
        (xi, phi)
    }

    /// (ℓ, log θ̃) as Taylor rectangles from tabulated series:
    /// `t` from [`Self::t_series`] and `xi` from [`Self::x_series_1d`].
    pub fn rect_1d(&self, t: &[f64], xi: &[f64]) -> (Rect, Rect) {
        let ell = Rect::outer(t, xi).scale(self.lambda());
        let lt = ell.shift(-self.ell_max);
        (ell, lt)
    }

    /// Jet of η̂ in a space whose variable 0 is time.
    pub fn eta_jet<'a>(&self, sp: &'a JetSpace, p: &[f64]) -> Jet<'a> {
        match &self.spec.family {
            Family::II { x0, .. } => {
                let n = sp.degree() + 1;
                let mut one = vec![0.0; n];
                one[0] = 1.0;
                let mut j = sp.zero();
                for (i, &xi0) in x0.iter().enumerate() {
                    let q = poly_taylor(&[xi0 * xi0, -2.0 * xi0, 1.0], p[i + 1], n);
                    let mut series: Vec<&[f64]> = vec![&one; sp.nvars()];
                    series[i + 1] = &q;
                    sp.add_separable(&mut j, 1.0, &series);
                }
                j
            }
            _ => self.eta.jet(sp, p).scale(self.eta_scale),
        }
    }

    pub fn jets<'a>(&self, sp: &'a JetSpace, p: &[f64]) -> Result<WeightJets<'a>> {
        if sp.nvars() != self.dim() + 1 || p.len() != self.dim() + 1 {
            return Err(Error::LengthMismatch {
                expected: self.dim() + 1,
                got: p.len(),
            });
        }
        let n = sp.degree() + 1;
        let t = self.t_series(p[0], n)?;
        let mut one = vec![0.0; n];
        one[0] = 1.0;
        let mut series: Vec<&[f64]> = vec![&one; sp.nvars()];
        series[0] = &t;
        let tj = sp.separable(&series);
        let eta = self.eta_jet(sp, p);
        let x = eta.scale(self.mu()).exp();
        let phi = &tj * &x;
        let ell = if self.delta != 0.0 {
            (&tj * &x.shift(-self.delta)).scale(self.lambda())
        } else {
            phi.scale(self.lambda())
        };
        if !ell.is_finite() || !phi.is_finite() {
            return Err(Error::WeightOverflow);
        }
        let log_theta = ell.shift(-self.ell_max);
        Ok(WeightJets {
            eta,
            phi,
            ell,
            log_theta,
        })
    }

    pub fn phi(&self, p: &[f64]) -> Result<f64> {
        let t = self.t_series(p[0], 1)?[0];
        Ok(t * (self.mu() * self.eta_value(&p[1..])).exp())
    }

    pub fn eta_value(&self, x: &[f64]) -> f64 {
        match &self.spec.family {
            Family::II { x0, .. } => x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum(),
            _ => self.eta.value(x) * self.eta_scale,
        }
    }

    pub fn ell(&self, p: &[f64]) -> Result<f64> {
        let t = self.t_series(p[0], 1)?[0];
        Ok(self.lambda() * t * ((self.mu() * self.eta_value(&p[1..])).exp() - self.delta))
    }

    /// log θ̃ = ℓ − ℓ_max.
    pub fn log_theta(&self, p: &[f64]) -> Result<f64> {
        Ok(self.ell(p)? - self.ell_max)
    }

    /// Full pointwise bundle.
    pub fn point(&self, p: &[f64]) -> Result<WeightPoint> {
        let d = self.dim();
        let sp = JetSpace::new(d + 1, 4);
        let j = self.jets(&sp, p)?;
        Ok(bundle_from_jets(&j, d))
    }
}

fn unit(d: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut o = vec![0; d + 1];
    for &(v, k) in pairs {
        o[v] += k;
    }
    o
}

pub(crate) fn bundle_from_jets(j: &WeightJets<'_>, d: usize) -> WeightPoint {
    let pl = |jet: &Jet<'_>, pairs: &[(usize, usize)]| jet.partial(&unit(d, pairs));
    let grad = |jet: &Jet<'_>| (1..=d).map(|i| pl(jet, &[(i, 1)])).collect::<Vec<_>>();
    let hess = |jet: &Jet<'_>| {
        (1..=d)
            .map(|i| (1..=d).map(|k| pl(jet, &[(i, 1), (k, 1)])).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let grad_ell = grad(&j.ell);
    let hess_ell = hess(&j.ell);
    let lap_ell: f64 = (0..d).map(|i| hess_ell[i][i]).sum();
    let grad_lap_ell = (1..=d)
        .map(|i| (1..=d).map(|k| pl(&j.ell, &[(i, 1), (k, 2)])).sum())
        .collect();
    let mut bilap_ell = 0.0;
    for i in 1..=d {
        for k in 1..=d {
            bilap_ell += pl(&j.ell, &[(i, 2), (k, 2)]);
        }
    }
    let a: f64 = grad_ell.iter().map(|g| g * g).sum();
    WeightPoint {
        phi: j.phi.value(),
        phi_s: pl(&j.phi, &[(0, 1)]),
        phi_ss: pl(&j.phi, &[(0, 2)]),
        ell: j.ell.value(),
        log_theta: j.log_theta.value(),
        ell_s: pl(&j.ell, &[(0, 1)]),
        ell_ss: pl(&j.ell, &[(0, 2)]),
        grad_eta: grad(&j.eta),
        hess_eta: hess(&j.eta),
        grad_ell,
        hess_ell,
        lap_ell,
        grad_lap_ell,
        bilap_ell,
        a,
        cap_lambda: a - lap_ell,
    }
}
