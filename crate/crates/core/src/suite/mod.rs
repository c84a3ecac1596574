//! The acceptance stages: each runs one group of checks with thresholds
//! taken from [`SuiteConfig`] and returns named pass/fail values plus an
//! optional data table.

mod config;
mod stages;

pub use stages::{lemma_fit, LemmaFit};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::numeric::sci17;
use crate::Result;

pub use config::{
    CarlemanStageConfig, ControlStageConfig, DecayConfig, DecompositionConfig, IdentityConfig, PointwiseConfig,
    ResolventConfig, SuiteConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    VerifyDecomposition,
    VerifyIdentities,
    VerifyPointwise,
    CarlemanBetaNeg,
    CarlemanBetaZero,
    PlateDecay,
    PlateResolvent,
    HumControl,
}

impl Stage {
    /// Order of `all`: shortest first.
    pub const ALL: [Stage; 8] = [
        Stage::HumControl,
        Stage::VerifyIdentities,
        Stage::PlateDecay,
        Stage::VerifyDecomposition,
        Stage::CarlemanBetaZero,
        Stage::PlateResolvent,
        Stage::CarlemanBetaNeg,
        Stage::VerifyPointwise,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::VerifyDecomposition => "verify-decomposition",
            Stage::VerifyIdentities => "verify-identities",
            Stage::VerifyPointwise => "verify-pointwise",
            Stage::CarlemanBetaNeg => "carleman-beta-neg",
            Stage::CarlemanBetaZero => "carleman-beta-zero",
            Stage::PlateDecay => "plate-decay",
            Stage::PlateResolvent => "plate-resolvent",
            Stage::HumControl => "hum-control",
        }
    }
}

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    AtMost,
    AtLeast,
    /// `pass` is set directly; value and threshold are informational.
    Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion number.
    pub criterion: u8,
    pub value: f64,
    pub threshold: f64,
    pub compare: Compare,
    pub pass: bool,
    /// Wall-clock measurement: not reproducible, kept out of CSV output.
    pub timing: bool,
}

impl Check {
    pub fn at_most(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Self::new(criterion, name, value, threshold, Compare::AtMost, value <= threshold)
    }

    pub fn at_least(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Self::new(criterion, name, value, threshold, Compare::AtLeast, value >= threshold)
    }

    pub fn flag(criterion: u8, name: &str, value: f64, threshold: f64, pass: bool) -> Self {
        Self::new(criterion, name, value, threshold, Compare::Flag, pass)
    }

    fn new(criterion: u8, name: &str, value: f64, threshold: f64, compare: Compare, pass: bool) -> Self {
        Check {
            name: name.to_string(),
            criterion,
            value,
            threshold,
            compare,
            pass,
            timing: false,
        }
    }

    pub fn timed(mut self) -> Self {
        self.timing = true;
        self
    }
}

/// Informational number without a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOutput {
    pub stage: Stage,
    pub checks: Vec<Check>,
    pub metrics: Vec<Metric>,
    /// The stage's data table as CSV, if it has one.
    pub table: Option<String>,
    pub notes: Vec<String>,
    /// Wall-clock seconds.
    pub seconds: f64,
}

impl StageOutput {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn run_stage(stage: Stage, cfg: &SuiteConfig) -> Result<StageOutput> {
    let start = Instant::now();
    let mut out = match stage {
        Stage::VerifyDecomposition => stages::decomposition(cfg),
        Stage::VerifyIdentities => stages::identities(cfg),
        Stage::VerifyPointwise => stages::pointwise(cfg),
        Stage::CarlemanBetaNeg => stages::carleman(&cfg.carleman_beta_neg, 5),
        Stage::CarlemanBetaZero => stages::carleman(&cfg.carleman_beta_zero, 6),
        Stage::PlateDecay => stages::decay(cfg),
        Stage::PlateResolvent => stages::resolvent(cfg),
        Stage::HumControl => stages::control(cfg),
    }?;
    out.stage = stage;
    out.seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

/// Rows `stage,criterion,name,value,threshold,pass` for every reproducible
/// check.
pub fn checks_csv(outputs: &[StageOutput]) -> String {
    let mut s = String::from("stage,criterion,name,value,threshold,pass\n");
    for o in outputs {
        for c in o.checks.iter().filter(|c| !c.timing) {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                o.stage.name(),
                c.criterion,
                c.name,
                sci17(c.value),
                sci17(c.threshold),
                c.pass
            ));
        }
    }
    s
}
