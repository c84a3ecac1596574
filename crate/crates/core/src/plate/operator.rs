use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::modes::{weighted_gram, ModalBasis};
use crate::fields::Interval;
use crate::{Error, Result};

/// Damping coefficient d(x) of the plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DampingProfile {
    /// d ≡ 0.
    None,
    /// d ≡ c.
    Constant { c: f64 },
    /// d = d0 on the box ω (one interval per axis), 0 elsewhere.
    Indicator { omega: Vec<Interval>, d0: f64 },
}

impl DampingProfile {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            DampingProfile::None => 0.0,
            DampingProfile::Constant { c } => *c,
            DampingProfile::Indicator { omega, d0 } => {
                if omega.iter().zip(x).all(|(iv, &xi)| iv.contains(xi)) {
                    *d0
                } else {
                    0.0
                }
            }
        }
    }

    /// (lower bound on ω, global upper bound d1).
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            DampingProfile::None => (0.0, 0.0),
            DampingProfile::Constant { c } => (*c, *c),
            DampingProfile::Indicator { d0, .. } => (*d0, *d0),
        }
    }

    /// True when d ≥ d0 > 0 on some open set, as the decay results require.
    pub fn is_admissible(&self) -> bool {
        self.bounds().0 > 0.0
    }

    fn breakpoints(&self, dim: usize) -> Vec<Vec<f64>> {
        match self {
            DampingProfile::Indicator { omega, .. } => omega.iter().map(|iv| vec![iv.lo, iv.hi]).collect(),
            _ => vec![vec![]; dim],
        }
    }

    fn validate(&self, lengths: &[f64]) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            DampingProfile::None => Ok(()),
            DampingProfile::Constant { c } if !(*c >= 0.0 && c.is_finite()) => {
                bad(format!("damping must be finite and ≥ 0, got {c}"))
            }
            DampingProfile::Constant { .. } => Ok(()),
            DampingProfile::Indicator { omega, d0 } => {
                if !(*d0 > 0.0 && d0.is_finite()) {
                    return bad(format!("d0 must be positive, got {d0}"));
                }
                if omega.len() != lengths.len() {
                    return bad("ω needs one interval per axis".into());
                }
                for (iv, &l) in omega.iter().zip(lengths) {
                    if !(iv.lo >= 0.0 && iv.hi <= l && iv.lo < iv.hi) {
                        return bad(format!("ω interval {iv:?} not inside (0, {l})"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Damped plate z_tt + Δ²z + d z_t = 0 in modal energy coordinates
/// y = (ω_n q_n, q_n'), so that |y|² = ‖Δz‖² + ‖z_t‖².
#[derive(Debug, Clone)]
pub struct PlateOperator {
    pub basis: ModalBasis,
    pub damping: DampingProfile,
    /// ∫ d φ_m φ_n.
    pub dmat: DMatrix<f64>,
    pub omega: DVector<f64>,
}

pub fn assemble(basis: &ModalBasis, damping: &DampingProfile) -> Result<PlateOperator> {
    damping.validate(&basis.lengths)?;
    let n = basis.len();
    let dmat = match damping {
        DampingProfile::None => DMatrix::zeros(n, n),
        DampingProfile::Constant { c } => DMatrix::identity(n, n) * *c,
        DampingProfile::Indicator { .. } => {
            let (pts, ws) = basis.nodes(&damping.breakpoints(basis.dim()))?;
            let keep: Vec<usize> = (0..pts.len()).filter(|&r| damping.value(&pts[r]) != 0.0).collect();
            let sub: Vec<Vec<f64>> = keep.iter().map(|&r| pts[r].clone()).collect();
            let w: Vec<f64> = keep.iter().map(|&r| ws[r] * damping.value(&pts[r])).collect();
            weighted_gram(&basis.table(&sub), &w)
        }
    };
    Ok(PlateOperator {
        basis: basis.clone(),
        damping: damping.clone(),
        dmat,
        omega: DVector::from_vec(basis.omegas()),
    })
}

impl PlateOperator {
    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    /// True when the modal damping matrix has no off-diagonal coupling, so
    /// each mode evolves on its own.
    pub fn is_decoupled(&self) -> bool {
        let n = self.modes();
        (0..n).all(|i| (0..n).all(|j| i == j || self.dmat[(i, j)] == 0.0))
    }

    /// 2N×2N generator [[0, Ω], [−Ω, −D]].
    pub fn system_matrix(&self) -> DMatrix<f64> {
        let n = self.modes();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, n + i)] = self.omega[i];
            m[(n + i, i)] = -self.omega[i];
            for j in 0..n {
                m[(n + i, n + j)] = -self.dmat[(i, j)];
            }
        }
        m
    }

    /// Eigenvalues of the generator, sorted by imaginary part.
    pub fn spectrum(&self) -> Result<Vec<Complex<f64>>> {
        let m = self.system_matrix().map(|x| Complex::new(x, 0.0));
        let s = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
            .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
        let mut ev: Vec<Complex<f64>> = s.unpack().1.diagonal().iter().cloned().collect();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).expect("finite"));
        Ok(ev)
    }
}

/// Plate state (z, z_t) in modal energy coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub y: DVector<f64>,
}

impl ModalState {
    /// From modal coefficients of z and z_t.
    pub fn from_modal(op: &PlateOperator, q0: &[f64], q1: &[f64]) -> Result<Self> {
        let n = op.modes();
        if q0.len() != n || q1.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: q0.len().min(q1.len()),
            });
        }
        let mut y = DVector::zeros(2 * n);
        for i in 0..n {
            y[i] = op.omega[i] * q0[i];
            y[n + i] = q1[i];
        }
        Ok(ModalState { y })
    }

    /// L² projection of z⁰ and z¹ onto the modes.
    pub fn from_functions<F, G>(op: &PlateOperator, z0: F, z1: G) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
        G: Fn(&[f64]) -> f64,
    {
        let q0 = op.basis.project(z0)?;
        let q1 = op.basis.project(z1)?;
        Self::from_modal(op, &q0, &q1)
    }

    /// ½(‖z_t‖² + ‖Δz‖²).
    pub fn energy(&self) -> f64 {
        0.5 * self.y.norm_squared()
    }

    /// Norm in H = H₀² × L² with ‖Δ·‖ on the first component.
    pub fn norm(&self) -> f64 {
        self.y.norm()
    }

    /// Graph norm ‖x‖ + ‖𝒜x‖.
    pub fn domain_norm(&self, op: &PlateOperator) -> f64 {
        self.norm() + (op.system_matrix() * &self.y).norm()
    }
}
