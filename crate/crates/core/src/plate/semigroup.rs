use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::operator::{ModalState, PlateOperator};
use crate::numeric::sci17;
use crate::{Error, Result};

/// Longest supported simulation horizon.
pub const MAX_TIME: f64 = 1e4;

/// Largest accepted condition number of the eigenvector matrix before the
/// dense exponential takes over.
const EIGEN_COND_MAX: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    /// Independent 2×2 blocks in closed form (diagonal damping matrix).
    ModalBlocks,
    /// Eigen-decomposition of the full generator.
    Diagonalized,
    /// Scaling-and-squaring Padé exponential, checked by step doubling.
    DenseExp,
}

/// Exact evaluator of t ↦ e^{t𝒜}y₀.
pub enum Propagator {
    Blocks { omega: Vec<f64>, damp: Vec<f64> },
    Eigen { lambda: Vec<Complex<f64>>, v: DMatrix<Complex<f64>> },
    Dense { m: DMatrix<f64> },
}

/// e^{tA} for A = [[0, ω], [−ω, −d]], valid through the critically damped
/// case.
pub fn block_exp(omega: f64, d: f64, t: f64) -> [[f64; 2]; 2] {
    let h = -0.5 * d;
    let s2 = 0.25 * d * d - omega * omega;
    // e^{ht}·(C·I + S·(A − h·I))
    let (c, s) = if s2.abs() * t * t < 1e-8 {
        let e = (h * t).exp();
        (e * (1.0 + 0.5 * s2 * t * t), e * t * (1.0 + s2 * t * t / 6.0))
    } else if s2 < 0.0 {
        let r = (-s2).sqrt();
        let e = (h * t).exp();
        (e * (r * t).cos(), e * (r * t).sin() / r)
    } else {
        let r = s2.sqrt();
        let (ep, em) = (((h + r) * t).exp(), ((h - r) * t).exp());
        (0.5 * (ep + em), 0.5 * (ep - em) / r)
    };
    [[c + s * (-h), s * omega], [-s * omega, c + s * (-d - h)]]
}

impl Propagator {
    pub fn new(op: &PlateOperator) -> Result<Self> {
        if op.is_decoupled() {
            return Ok(Propagator::Blocks {
                omega: op.omega.iter().cloned().collect(),
                damp: op.dmat.diagonal().iter().cloned().collect(),
            });
        }
        let m = op.system_matrix();
        match eigen(&m) {
            Some((lambda, v)) => Ok(Propagator::Eigen { lambda, v }),
            None => Ok(Propagator::Dense { m }),
        }
    }

    pub fn method(&self) -> Propagation {
        match self {
            Propagator::Blocks { .. } => Propagation::ModalBlocks,
            Propagator::Eigen { .. } => Propagation::Diagonalized,
            Propagator::Dense { .. } => Propagation::DenseExp,
        }
    }

    /// States at every time in `times`.
    pub fn evolve(&self, y0: &DVector<f64>, times: &[f64]) -> Result<Vec<DVector<f64>>> {
        match self {
            Propagator::Blocks { omega, damp } => {
                let n = omega.len();
                Ok(times
                    .iter()
                    .map(|&t| {
                        let mut y = DVector::zeros(2 * n);
                        for i in 0..n {
                            let e = block_exp(omega[i], damp[i], t);
                            y[i] = e[0][0] * y0[i] + e[0][1] * y0[n + i];
                            y[n + i] = e[1][0] * y0[i] + e[1][1] * y0[n + i];
                        }
                        y
                    })
                    .collect())
            }
            Propagator::Eigen { lambda, v } => {
                let yc = y0.map(|x| Complex::new(x, 0.0));
                let c = v
                    .clone()
                    .lu()
                    .solve(&yc)
                    .ok_or_else(|| Error::Singular("eigenvector matrix".into()))?;
                Ok(times
                    .iter()
                    .map(|&t| {
                        let ect = DVector::from_iterator(
                            c.len(),
                            c.iter().zip(lambda).map(|(ci, l)| ci * (l * t).exp()),
                        );
                        (v * ect).map(|z| z.re)
                    })
                    .collect())
            }
            Propagator::Dense { m } => times
                .iter()
                .map(|&t| {
                    let full = expm(&(m * t)) * y0;
                    let half = expm(&(m * (0.5 * t)));
                    let twice = &half * (&half * y0);
                    let err = (&full - &twice).norm() / full.norm().max(f64::MIN_POSITIVE);
                    if err > 1e-8 {
                        return Err(Error::Numerical(format!(
                            "matrix exponential step-doubling mismatch {err:e} at t = {t}"
                        )));
                    }
                    Ok(full)
                })
                .collect(),
        }
    }
}

/// Eigenvalues and unit eigenvectors from the complex Schur form, or None
/// when the eigenvector basis is too ill-conditioned to trust.
fn eigen(m: &DMatrix<f64>) -> Option<(Vec<Complex<f64>>, DMatrix<Complex<f64>>)> {
    let n = m.nrows();
    let mc = m.map(|x| Complex::new(x, 0.0));
    let (q, t) = nalgebra::linalg::Schur::try_new(mc.clone(), 1e-15, 10_000)?.unpack();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let tiny = 1e-14 * scale;
    let mut x = DMatrix::<Complex<f64>>::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        x[(k, k)] = Complex::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut den = t[(i, i)] - lk;
            if den.norm() < tiny {
                den = Complex::new(tiny, 0.0);
            }
            x[(i, k)] = -s / den;
        }
    }
    let mut v = q * x;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        col /= Complex::new(nrm, 0.0);
    }
    let lambda: Vec<Complex<f64>> = t.diagonal().iter().cloned().collect();
    let inv = v.clone().try_inverse()?;
    let cond = v.norm() * inv.norm() / n as f64;
    let resid = (&mc * &v - &v * DMatrix::from_diagonal(&DVector::from_vec(lambda.clone()))).norm();
    if cond > EIGEN_COND_MAX || resid > 1e-10 * scale * (n as f64).sqrt() {
        return None;
    }
    Some((lambda, v))
}

/// Padé(13) scaling-and-squaring exponential.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let theta13 = 5.371920351148152;
    let s = if norm1 > theta13 { (norm1 / theta13).log2().ceil() as i32 } else { 0 };
    let a = a * 2f64.powi(-s);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u = &a * (&a6 * (&a6 * B[13] + &a4 * B[11] + &a2 * B[9]) + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1]);
    let v = &a6 * (&a6 * B[12] + &a4 * B[10] + &a2 * B[8]) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    let mut r = (&v - &u).lu().solve(&(&v + &u)).expect("Padé denominator is invertible for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Energy trace of one trajectory and the log-decay statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// ‖(z⁰, z¹)‖_{D(𝒜)}.
    pub domain_norm: f64,
    /// sup_t √E(t)·log(2+t)/‖(z⁰, z¹)‖_{D(𝒜)}.
    pub statistic: f64,
    pub method: Propagation,
}

impl DecayTrace {
    /// Rows `t,energy`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,energy\n");
        for (t, e) in self.times.iter().zip(&self.energies) {
            s.push_str(&format!("{},{}\n", sci17(*t), sci17(*e)));
        }
        s
    }

    /// Largest relative increase E(t_{k+1})/E(t_k) − 1 between samples.
    pub fn max_increase(&self) -> f64 {
        self.energies
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] - 1.0 } else { 0.0 })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// t = 0 followed by `samples − 1` log-spaced times in [10⁻², T].
pub fn decay_times(t_end: f64, samples: usize) -> Vec<f64> {
    let mut t = vec![0.0];
    let k = samples.saturating_sub(1).max(1);
    let (a, b) = ((1e-2f64).min(t_end).ln(), t_end.ln());
    for j in 0..k {
        let f = if k == 1 { 1.0 } else { j as f64 / (k - 1) as f64 };
        t.push((a + (b - a) * f).exp());
    }
    *t.last_mut().expect("nonempty") = t_end;
    t
}

/// Evolves `init` exactly and samples the energy on [`decay_times`].
pub fn simulate_decay(op: &PlateOperator, init: &ModalState, t_end: f64, samples: usize) -> Result<DecayTrace> {
    if !(t_end > 0.0 && t_end <= MAX_TIME) {
        return Err(Error::Config(format!("horizon must be in (0, {MAX_TIME}], got {t_end}")));
    }
    if samples < 2 {
        return Err(Error::Config("need at least 2 time samples".into()));
    }
    let prop = Propagator::new(op)?;
    let times = decay_times(t_end, samples);
    let states = prop.evolve(&init.y, &times)?;
    let energies: Vec<f64> = states.iter().map(|y| 0.5 * y.norm_squared()).collect();
    let dn = init.domain_norm(op);
    let statistic = if dn > 0.0 {
        times
            .iter()
            .zip(&energies)
            .map(|(t, e)| e.sqrt() * (2.0 + t).ln() / dn)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(DecayTrace {
        times,
        energies,
        domain_norm: dn,
        statistic,
        method: prop.method(),
    })
}
