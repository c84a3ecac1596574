use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::carleman_grid;
use super::sides::{carleman_sides_beta_neg, carleman_sides_beta_zero, BoundaryCondition, CarlemanSides};
use crate::conjugation::OperatorParams;
use crate::fields::{exterior_test_field, random_test_field, Interval, Seed, SpaceTimeDomain, TemporalCondition, TestField};
use crate::numeric::sci17;
use crate::par;
use crate::weights::{build_eta, build_weight, family_iii_slab, Family, FamilyTag, WeightField, WeightSpec};
use crate::{Error, Result};

/// Attached to β = 0 reports: the bilaplacian enters the left side squared.
pub const BILAP_NOTE: &str = "bilaplacian block integrated as |Δ²v|²";

/// Relative slack allowed when validating a fitted constant.
pub const VALIDATION_SLACK: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepRegime {
    BetaNeg,
    BetaZero,
}

/// How the sweep's test fields are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Random fields over all of Ω.
    Random,
    /// Fields vanishing on ω.
    Exterior,
    /// Identically zero fields; the report is flagged degenerate.
    Zero,
}

fn default_k() -> f64 {
    1.0
}
fn default_panels() -> usize {
    12
}
fn default_order() -> usize {
    8
}
fn default_kind() -> FieldKind {
    FieldKind::Random
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub family: FamilyTag,
    /// Exponent of the family-I time factor.
    #[serde(default = "default_k")]
    pub k: f64,
    pub bc: BoundaryCondition,
    pub regime: SweepRegime,
    pub alpha: f64,
    pub beta: f64,
    pub fields: usize,
    pub seed: u64,
    /// Uniform panels per axis before grading.
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_kind")]
    pub field_kind: FieldKind,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.lambdas.len() < 3 {
            return bad("need at least 3 λ values".into());
        }
        let lo = self.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.lambdas.iter().cloned().fold(0.0, f64::max);
        if !(lo > 1.0 && hi >= 4.0 * lo) {
            return bad(format!("λ values must exceed 1 and span a factor ≥ 4, got [{lo}, {hi}]"));
        }
        if self.mus.is_empty() || self.mus.iter().any(|&m| !(m >= 1.0)) {
            return bad("μ values must be ≥ 1".into());
        }
        if self.fields < 2 {
            return bad("need at least 2 fields for a train/validate split".into());
        }
        match self.regime {
            SweepRegime::BetaNeg if !(self.beta < 0.0) => bad(format!("regime beta_neg needs β < 0, got {}", self.beta)),
            SweepRegime::BetaZero if self.beta != 0.0 || self.alpha == 0.0 => {
                bad(format!("regime beta_zero needs β = 0 and α ≠ 0, got α = {}, β = {}", self.alpha, self.beta))
            }
            SweepRegime::BetaZero if self.family != FamilyTag::I => bad("regime beta_zero needs family I".into()),
            _ if self.family == FamilyTag::II => bad("family II sweeps are not supported".into()),
            _ => Ok(()),
        }
    }
}

/// Ω = (0, 1) with ω0 = (0.45, 0.55) and ω = (0.4, 0.6).
pub fn default_regions() -> (Interval, Interval) {
    (Interval::new(0.45, 0.55), Interval::new(0.4, 0.6))
}

/// Weight for one (λ, μ) of a sweep, with its space-time domain.
pub fn sweep_weight(cfg: &SweepConfig, lambda: f64, mu: f64) -> Result<WeightField> {
    let (omega0, omega) = default_regions();
    let (family, slab) = match cfg.family {
        FamilyTag::I => (Family::I { k: cfg.k }, (0.0, 1.0)),
        FamilyTag::III => {
            let (b, _) = family_iii_slab(mu);
            (Family::III { b }, (-b, b))
        }
        FamilyTag::II => return Err(Error::Config("family II sweeps are not supported".into())),
    };
    let d = SpaceTimeDomain::interval(slab.0, slab.1, 1.0)?;
    let eta = build_eta(&d, &[omega0], &[omega])?;
    build_weight(&WeightSpec::new(family, lambda, mu)?, &eta, &d)
}

/// The sweep's fields for a given domain, in field-id order.
pub fn sweep_fields(cfg: &SweepConfig, domain: &SpaceTimeDomain) -> Vec<TestField> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let temporal = match cfg.regime {
        SweepRegime::BetaNeg => TemporalCondition::VanishEndpointsWithDerivative,
        SweepRegime::BetaZero => TemporalCondition::None,
    };
    (0..cfg.fields)
        .map(|_| {
            let seed = Seed(rng.random());
            match cfg.field_kind {
                FieldKind::Random => random_test_field(seed, cfg.bc.into(), temporal, domain),
                FieldKind::Exterior => exterior_test_field(seed, default_regions().1, domain),
                FieldKind::Zero => TestField::zero(1),
            }
        })
        .collect()
}

/// Sides for one cell, dispatching on the regime.
pub fn cell_sides(
    cfg: &SweepConfig,
    w: &WeightField,
    v: &TestField,
    grid: &crate::fields::QuadratureGrid,
) -> Result<CarlemanSides> {
    let p = OperatorParams::new(cfg.alpha, cfg.beta)?;
    let omega = default_regions().1;
    match cfg.regime {
        SweepRegime::BetaNeg => carleman_sides_beta_neg(w, &p, v, cfg.bc, omega, grid),
        SweepRegime::BetaZero => carleman_sides_beta_zero(w, &p, v, cfg.bc, omega, grid),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub mu: f64,
    pub field_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSummary {
    pub mu: f64,
    /// Largest training-field ratio over the whole λ list.
    pub c_emp: Option<f64>,
    /// Smallest λ from which validation passes at every larger λ.
    pub lambda0_emp: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub cells: Vec<SweepCell>,
    pub per_mu: Vec<MuSummary>,
    /// Largest fitted constant over μ.
    #[serde(rename = "C_emp")]
    pub c_emp: Option<f64>,
    /// Largest empirical λ0 over μ.
    pub lambda0_emp: Option<f64>,
    pub pass: bool,
    /// Every field is identically zero, so nothing was tested.
    pub degenerate: bool,
    /// Reading choices that affect the reported numbers.
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(rename = "C_emp")]
    c_emp: Option<f64>,
    lambda0_emp: Option<f64>,
    pass: bool,
    degenerate: bool,
    per_mu: &'a [MuSummary],
    notes: &'a [String],
}

impl CarlemanReport {
    /// One row per cell: lambda, mu, field_id, lhs, rhs, ratio.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,mu,field_id,lhs,rhs,ratio\n");
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                sci17(c.lambda),
                sci17(c.mu),
                c.field_id,
                sci17(c.lhs),
                sci17(c.rhs),
                sci17(c.ratio)
            ));
        }
        s
    }

    /// JSON-ready summary `{C_emp, lambda0_emp, pass, ...}`.
    pub fn summary(&self) -> impl Serialize + '_ {
        Summary {
            c_emp: self.c_emp,
            lambda0_emp: self.lambda0_emp,
            pass: self.pass,
            degenerate: self.degenerate,
            per_mu: &self.per_mu,
            notes: &self.notes,
        }
    }
}

/// Fits one C as the largest training ratio over every λ, then returns
/// (C, λ0) where λ0 is the smallest λ from which every held-out ratio stays
/// within C·(1 + slack). `ratios[j][f]` is the ratio at the j-th smallest λ
/// for field f; fields `..train` are the training set.
pub fn fit_lambda0(lambdas: &[f64], ratios: &[Vec<f64>], train: usize) -> Option<(f64, f64)> {
    let c = ratios
        .iter()
        .flat_map(|r| r[..train].iter().cloned())
        .fold(0.0, f64::max);
    if !c.is_finite() {
        return None;
    }
    let ok: Vec<bool> = ratios
        .iter()
        .map(|r| r[train..].iter().all(|&x| x <= c * (1.0 + VALIDATION_SLACK)))
        .collect();
    let first_bad_from_top = ok.iter().rposition(|&b| !b);
    let i = first_bad_from_top.map_or(0, |j| j + 1);
    (i < lambdas.len()).then(|| (c, lambdas[i]))
}

/// Runs every (μ, λ, field) cell; the first half of the fields trains C, the
/// rest validates it.
pub fn lambda_sweep(cfg: &SweepConfig) -> Result<CarlemanReport> {
    cfg.validate()?;
    let mut lambdas = cfg.lambdas.clone();
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite λ"));
    let train = cfg.fields / 2;
    let mut cells = Vec::new();
    let mut per_mu = Vec::new();
    let mut degenerate = true;
    for &mu in &cfg.mus {
        let mut ratios = Vec::new();
        for &lambda in &lambdas {
            let w = sweep_weight(cfg, lambda, mu)?;
            let fields = sweep_fields(cfg, &w.domain);
            degenerate &= fields.iter().all(|f| f.is_zero());
            let grid = carleman_grid(&w, default_regions().1, cfg.panels, cfg.order)?;
            let sides = par::map_slice(&fields, |v| cell_sides(cfg, &w, v, &grid));
            let mut row = Vec::with_capacity(fields.len());
            for (id, s) in sides.into_iter().enumerate() {
                let s = s?;
                row.push(s.ratio());
                cells.push(SweepCell {
                    lambda,
                    mu,
                    field_id: id,
                    lhs: s.lhs(),
                    rhs: s.rhs(),
                    ratio: s.ratio(),
                });
            }
            ratios.push(row);
        }
        let fit = fit_lambda0(&lambdas, &ratios, train);
        per_mu.push(MuSummary {
            mu,
            c_emp: fit.map(|f| f.0),
            lambda0_emp: fit.map(|f| f.1),
            pass: fit.is_some(),
        });
    }
    let pass = !degenerate && per_mu.iter().all(|m| m.pass);
    let c_emp = per_mu.iter().filter_map(|m| m.c_emp).reduce(f64::max);
    let lambda0_emp = per_mu.iter().filter_map(|m| m.lambda0_emp).reduce(f64::max);
    Ok(CarlemanReport {
        cells,
        per_mu,
        c_emp,
        lambda0_emp,
        pass,
        degenerate,
        notes: match cfg.regime {
            SweepRegime::BetaZero => vec![BILAP_NOTE.to_string()],
            SweepRegime::BetaNeg => vec![],
        },
    })
}
