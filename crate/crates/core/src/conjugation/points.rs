use serde::{Deserialize, Serialize};

use super::OperatorParams;
use crate::fields::TestField;
use crate::jet::{Jet, JetSpace};
use crate::weights::WeightField;
use crate::Result;

/// Partials of a space-time function at one point, up to the orders P and
/// its decomposition need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZPoint {
    pub z: f64,
    pub z_s: f64,
    pub z_ss: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
    pub lap: f64,
    pub grad_lap: Vec<f64>,
    pub bilap: f64,
}

impl ZPoint {
    pub fn zero(dim: usize) -> Self {
        ZPoint {
            z: 0.0,
            z_s: 0.0,
            z_ss: 0.0,
            grad: vec![0.0; dim],
            hess: vec![vec![0.0; dim]; dim],
            lap: 0.0,
            grad_lap: vec![0.0; dim],
            bilap: 0.0,
        }
    }

    /// Reads the partials off a jet of degree ≥ 4 whose variable 0 is time.
    pub fn from_jet(j: &Jet<'_>) -> Self {
        let d = j.space().nvars() - 1;
        let mut o = vec![0usize; d + 1];
        let mut part = |pairs: &[(usize, usize)]| {
            o.iter_mut().for_each(|x| *x = 0);
            for &(v, k) in pairs {
                o[v] += k;
            }
            j.partial(&o)
        };
        let grad: Vec<f64> = (1..=d).map(|i| part(&[(i, 1)])).collect();
        let hess: Vec<Vec<f64>> = (1..=d)
            .map(|i| (1..=d).map(|k| part(&[(i, 1), (k, 1)])).collect())
            .collect();
        let grad_lap = (1..=d)
            .map(|i| (1..=d).map(|k| part(&[(i, 1), (k, 2)])).sum())
            .collect();
        let mut bilap = 0.0;
        for i in 1..=d {
            for k in 1..=d {
                bilap += part(&[(i, 2), (k, 2)]);
            }
        }
        ZPoint {
            z: j.value(),
            z_s: part(&[(0, 1)]),
            z_ss: part(&[(0, 2)]),
            lap: (0..d).map(|i| hess[i][i]).sum(),
            grad,
            hess,
            grad_lap,
            bilap,
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

/// Partials of a test field at `p`.
pub fn field_point(f: &TestField, p: &[f64]) -> ZPoint {
    let sp = JetSpace::new(f.dim + 1, 4);
    ZPoint::from_jet(&f.jet(&sp, p))
}

/// Partials of z = θ̃·v at `p`.
pub fn theta_times_field_point(w: &WeightField, v: &TestField, p: &[f64]) -> Result<ZPoint> {
    let sp = JetSpace::new(v.dim + 1, 4);
    let j = w.jets(&sp, p)?;
    let z = &j.log_theta.exp() * &v.jet(&sp, p);
    Ok(ZPoint::from_jet(&z))
}

/// αv_s + βv_ss + Δ²v at `p`.
pub fn apply_p(params: &OperatorParams, v: &TestField, p: &[f64]) -> f64 {
    let z = field_point(v, p);
    params.alpha * z.z_s + params.beta * z.z_ss + z.bilap
}
