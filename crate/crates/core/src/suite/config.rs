use serde::{Deserialize, Serialize};

use crate::carleman::{BoundaryCondition, FieldKind, SweepConfig, SweepRegime};
use crate::control::ControlConfig;
use crate::energies::CATALOG;
use crate::fields::Interval;
use crate::weights::FamilyTag;
use crate::{Error, Result};

/// Every parameter and threshold of the acceptance stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub decomposition: DecompositionConfig,
    pub identities: IdentityConfig,
    pub pointwise: PointwiseConfig,
    pub carleman_beta_neg: CarlemanStageConfig,
    pub carleman_beta_zero: CarlemanStageConfig,
    pub decay: DecayConfig,
    pub resolvent: ResolventConfig,
    pub control: ControlStageConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            decomposition: DecompositionConfig::default(),
            identities: IdentityConfig::default(),
            pointwise: PointwiseConfig::default(),
            carleman_beta_neg: CarlemanStageConfig::beta_neg(),
            carleman_beta_zero: CarlemanStageConfig::beta_zero(),
            decay: DecayConfig::default(),
            resolvent: ResolventConfig::default(),
            control: ControlStageConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecompositionConfig {
    /// Random points per (weight, params) combination; the combinations are
    /// families I and III × β ∈ {−1, 0} × α ∈ {0, 1}.
    pub points: usize,
    pub lambda: f64,
    pub mu: f64,
    pub tol: f64,
    /// Wall-clock budget of the identity check on one worker.
    pub max_seconds: f64,
    /// Uniform panels per axis of the coarse and fine symmetry grids.
    pub symmetry_panels: [usize; 2],
    pub symmetry_lambda: f64,
    pub symmetry_tol: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            points: 200,
            lambda: 5.0,
            mu: 2.0,
            tol: 1e-9,
            max_seconds: 30.0,
            symmetry_panels: [6, 24],
            symmetry_lambda: 2.0,
            symmetry_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityConfig {
    pub ids: Vec<String>,
    /// Random fields per identity and weight.
    pub trials: usize,
    pub points_per_trial: usize,
    pub tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            ids: CATALOG.iter().map(|s| s.to_string()).collect(),
            trials: 50,
            points_per_trial: 4,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointwiseConfig {
    /// Seeds per boundary condition for the oracle check.
    pub oracle_fields: usize,
    pub oracle_points: usize,
    pub oracle_tol: f64,
    /// λ values for the P₄P₁ and u-estimate suites (consecutive doublings).
    pub lemma_lambdas: Vec<f64>,
    /// λ values for the gradient-estimate suite.
    pub gradient_lambdas: Vec<f64>,
    /// Fields per suite; the first half trains, the rest is held out.
    pub lemma_fields: usize,
    pub lemma_panels: usize,
    pub slack: f64,
    /// Allowed growth of a fitted constant under λ doubling.
    pub stability: f64,
}

impl Default for PointwiseConfig {
    fn default() -> Self {
        PointwiseConfig {
            oracle_fields: 8,
            oracle_points: 100,
            oracle_tol: 1e-6,
            lemma_lambdas: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            gradient_lambdas: vec![8.0, 16.0, 32.0, 64.0],
            lemma_fields: 20,
            lemma_panels: 8,
            slack: 0.01,
            stability: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanStageConfig {
    pub sweep: SweepConfig,
    /// Ratios must agree to this under a shift of log θ_max.
    #[serde(default = "default_scale_tol")]
    pub scale_tol: f64,
    #[serde(default = "default_sweep_seconds")]
    pub max_seconds: f64,
}

fn default_scale_tol() -> f64 {
    1e-12
}

fn default_sweep_seconds() -> f64 {
    300.0
}

impl CarlemanStageConfig {
    pub fn beta_neg() -> Self {
        CarlemanStageConfig {
            sweep: SweepConfig {
                lambdas: vec![8.0, 16.0, 32.0, 64.0],
                mus: vec![2.0],
                family: FamilyTag::III,
                k: 1.0,
                bc: BoundaryCondition::Clamped,
                regime: SweepRegime::BetaNeg,
                alpha: 0.0,
                beta: -1.0,
                fields: 20,
                seed: 42,
                panels: 12,
                order: 8,
                field_kind: FieldKind::Random,
            },
            scale_tol: default_scale_tol(),
            max_seconds: default_sweep_seconds(),
        }
    }

    pub fn beta_zero() -> Self {
        let mut c = Self::beta_neg();
        c.sweep.family = FamilyTag::I;
        c.sweep.regime = SweepRegime::BetaZero;
        c.sweep.alpha = 1.0;
        c.sweep.beta = 0.0;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub modes: usize,
    /// Mode count of the refinement run.
    pub refined_modes: usize,
    pub omega: Interval,
    pub d0: f64,
    pub horizon: f64,
    pub samples: usize,
    pub conservation_horizon: f64,
    pub conservation_tol: f64,
    pub stability_tol: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            modes: 64,
            refined_modes: 128,
            omega: Interval::new(0.4, 0.6),
            d0: 1.0,
            horizon: 1e4,
            samples: 200,
            conservation_horizon: 100.0,
            conservation_tol: 1e-10,
            stability_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolventConfig {
    pub modes: usize,
    pub refined_modes: usize,
    pub omega: Interval,
    pub d0: f64,
    pub gamma_max: f64,
    pub samples: usize,
    pub stability_tol: f64,
    /// Mode count of the undamped comparison with 1/dist(γ, spectrum).
    pub undamped_modes: usize,
    pub undamped_tol: f64,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        ResolventConfig {
            modes: 64,
            refined_modes: 128,
            omega: Interval::new(0.4, 0.6),
            d0: 1.0,
            gamma_max: 200.0,
            samples: 100,
            stability_tol: 0.1,
            undamped_modes: 16,
            undamped_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlStageConfig {
    pub problem: ControlConfig,
    /// Bound on ‖y(T)‖/‖y⁰‖.
    pub target: f64,
    pub symmetry_tol: f64,
    pub duality_tol: f64,
    /// Random probe pairs for the Gramian symmetry check.
    pub probes: usize,
}

impl Default for ControlStageConfig {
    fn default() -> Self {
        ControlStageConfig {
            problem: ControlConfig::default(),
            target: 1e-3,
            symmetry_tol: 1e-10,
            duality_tol: 1e-9,
            probes: 10,
        }
    }
}

impl SuiteConfig {
    /// Checks what the stages cannot check for themselves.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        let d = &self.decomposition;
        if d.points == 0 || d.symmetry_panels[0] == 0 || d.symmetry_panels[1] <= d.symmetry_panels[0] {
            return bad("decomposition needs points ≥ 1 and increasing symmetry panels");
        }
        if self.identities.trials == 0 || self.identities.points_per_trial == 0 {
            return bad("identities need trials and points ≥ 1");
        }
        for id in &self.identities.ids {
            if !CATALOG.contains(&id.as_str()) {
                return Err(Error::UnknownIdentity(id.clone()));
            }
        }
        let p = &self.pointwise;
        if p.lemma_fields < 2 || p.lemma_lambdas.len() < 2 || p.gradient_lambdas.len() < 2 || p.oracle_points == 0 || p.oracle_fields == 0 {
            return bad("pointwise needs ≥ 2 fields, ≥ 2 λ values and oracle points");
        }
        if self.decay.refined_modes <= self.decay.modes || self.resolvent.refined_modes <= self.resolvent.modes {
            return bad("refined mode counts must exceed the base counts");
        }
        self.carleman_beta_neg.sweep.validate()?;
        self.carleman_beta_zero.sweep.validate()?;
        Ok(())
    }
}
