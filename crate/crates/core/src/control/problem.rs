use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::fields::{AxisRule, Interval};
use crate::plate::{assemble, clamped_modes, hinged_modes, DampingProfile, ModalBasis, PlateBc};
use crate::{par, Error, Result};

/// Gauss order on each time panel.
const TIME_ORDER: usize = 10;
/// The first time panel next to t = T satisfies 2·λ_max·width ≤ this.
const FIRST_PANEL_SCALE: f64 = 1e-2;

/// Composite Gauss rule on [0, T], graded geometrically towards t = T where
/// the adjoint kernels e^{−λ(T−t)} of the stiff modes live. Nodes are kept
/// in time-to-go s = T − t as well, since T − t loses digits near t = T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Increasing times t.
    pub nodes: Vec<f64>,
    /// T − t for every node.
    pub to_go: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeGrid {
    pub fn graded(horizon: f64, lambda_max: f64) -> Result<Self> {
        let s_min = (FIRST_PANEL_SCALE / (2.0 * lambda_max.max(1.0))).min(horizon / 4.0);
        let mut s = vec![0.0, s_min];
        while s[s.len() - 1] * 2.0 < horizon {
            let last = s[s.len() - 1];
            s.push(last * 2.0);
        }
        s.push(horizon);
        let rule = AxisRule::from_breakpoints(&s, TIME_ORDER)?;
        let to_go: Vec<f64> = rule.nodes.into_iter().rev().collect();
        Ok(TimeGrid {
            nodes: to_go.iter().map(|x| horizon - x).collect(),
            to_go,
            weights: rule.weights.into_iter().rev().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Null-control problem y_t + Δ²y = χ_ω u, y(0) = y⁰, in a modal basis.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub basis: ModalBasis,
    pub horizon: f64,
    pub omega: Vec<Interval>,
    pub epsilon: f64,
    /// Modal coefficients of y⁰.
    pub y0: DVector<f64>,
    /// Modal matrix of multiplication by χ_ω.
    pub chi: DMatrix<f64>,
    /// Eigenvalues λ_n = ω_n² of Δ².
    pub lambda: DVector<f64>,
    pub grid: TimeGrid,
}

impl ControlProblem {
    pub fn new(basis: ModalBasis, horizon: f64, omega: Vec<Interval>, epsilon: f64, y0: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("ε must be positive, got {epsilon}")));
        }
        if y0.len() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                got: y0.len(),
            });
        }
        let chi = assemble(&basis, &DampingProfile::Indicator { omega: omega.clone(), d0: 1.0 })?.dmat;
        let lambda = DVector::from_iterator(basis.len(), basis.modes.iter().map(|m| m.eigenvalue));
        let grid = TimeGrid::graded(horizon, lambda.max())?;
        Ok(ControlProblem {
            basis,
            horizon,
            omega,
            epsilon,
            y0: DVector::from_vec(y0),
            chi,
            lambda,
            grid,
        })
    }

    pub fn modes(&self) -> usize {
        self.lambda.len()
    }

    /// e^{−λ_n s} for every mode.
    fn decay(&self, s: f64) -> DVector<f64> {
        self.lambda.map(|l| (-l * s).exp())
    }

    /// Uncontrolled final state e^{−λ_n T} y⁰_n.
    pub fn free_final(&self) -> DVector<f64> {
        self.decay(self.horizon).component_mul(&self.y0)
    }
}

/// Modal coefficients of a field sampled on the problem's time grid. The
/// system is driven by χ_ω times this field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSamples {
    pub times: Vec<f64>,
    /// One row per time, one column per mode.
    pub coeffs: DMatrix<f64>,
}

/// y(T) of the forced system by per-mode variation of constants, the
/// forcing integral taken on the time grid.
pub fn forward_solve(p: &ControlProblem, u: &ControlSamples) -> Result<DVector<f64>> {
    let n = p.modes();
    if u.coeffs.ncols() != n || u.coeffs.nrows() != p.grid.len() {
        return Err(Error::LengthMismatch {
            expected: p.grid.len() * n,
            got: u.coeffs.len(),
        });
    }
    let forcing = &u.coeffs * &p.chi;
    let acc = par::map_range(n, |m| {
        let l = p.lambda[m];
        let mut s = 0.0;
        for (k, (&sk, &w)) in p.grid.to_go.iter().zip(&p.grid.weights).enumerate() {
            s += w * (-l * sk).exp() * forcing[(k, m)];
        }
        s
    });
    Ok(p.free_final() + DVector::from_vec(acc))
}

/// φ(t) = e^{−λ(T−t)} φ_T on the time grid.
pub fn adjoint_solve(p: &ControlProblem, phi_t: &DVector<f64>) -> Result<ControlSamples> {
    let n = p.modes();
    if phi_t.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: phi_t.len(),
        });
    }
    let mut coeffs = DMatrix::zeros(p.grid.len(), n);
    for (k, &sk) in p.grid.to_go.iter().enumerate() {
        let row = p.decay(sk).component_mul(phi_t);
        coeffs.row_mut(k).copy_from(&row.transpose());
    }
    Ok(ControlSamples {
        times: p.grid.nodes.clone(),
        coeffs,
    })
}

/// JSON description of a control problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    pub bc: PlateBc,
    pub modes: usize,
    pub lengths: Vec<f64>,
    pub horizon: f64,
    pub omega: Vec<Interval>,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Modal coefficients of y⁰; defaults to the projection of
    /// ∏ 4x(L−x)/L².
    pub y0: Option<Vec<f64>>,
}

fn default_tol() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    200
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            bc: PlateBc::Hinged,
            modes: 64,
            lengths: vec![1.0],
            horizon: 0.1,
            omega: vec![Interval::new(0.4, 0.6)],
            epsilon: 1e-10,
            tol: default_tol(),
            max_iter: default_max_iter(),
            y0: None,
        }
    }
}

impl ControlConfig {
    pub fn build(&self) -> Result<ControlProblem> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config("tol must be positive and max_iter ≥ 1".into()));
        }
        let basis = match self.bc {
            PlateBc::Hinged => hinged_modes(self.modes, &self.lengths)?,
            PlateBc::Clamped => {
                if self.lengths.len() != 1 {
                    return Err(Error::Config("clamped modes are one-dimensional".into()));
                }
                clamped_modes(self.modes, self.lengths[0])?
            }
        };
        let y0 = match &self.y0 {
            Some(v) => v.clone(),
            None => {
                let ls = self.lengths.clone();
                basis.project(|x| x.iter().zip(&ls).map(|(&xi, &l)| 4.0 * xi * (l - xi) / (l * l)).product())?
            }
        };
        ControlProblem::new(basis, self.horizon, self.omega.clone(), self.epsilon, y0)
    }
}
