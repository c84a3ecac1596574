use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Large parameter λ of θ = e^{λξ}.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lambda(pub f64);

/// Parameter μ of φ = e^{μ·…}.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mu(pub f64);

/// The three admissible weight families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Singular in time: φ = e^{μη}/((s−b1)(b2−s))^k.
    I { k: f64 },
    /// Gaussian in time: φ = ξ = e^{μ(|x−x0|² − c(s−s0)²)}.
    II { s0: f64, c: f64, x0: Vec<f64> },
    /// Compact slab: φ = ξ = e^{μ(η/‖η‖ + b² − s²)}.
    III { b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyTag {
    I,
    II,
    III,
}

impl Family {
    pub fn tag(&self) -> FamilyTag {
        match self {
            Family::I { .. } => FamilyTag::I,
            Family::II { .. } => FamilyTag::II,
            Family::III { .. } => FamilyTag::III,
        }
    }
}

/// A weight family with its parameters. λ = 0 is accepted as the trivial
/// weight θ ≡ 1; otherwise λ > 1. μ ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightConfig", into = "WeightConfig")]
pub struct WeightSpec {
    pub family: Family,
    pub lambda: Lambda,
    pub mu: Mu,
}

/// Flat serialized form (keys family, lambda, mu, k, s0, c, x0, b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub family: FamilyTag,
    pub lambda: f64,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl WeightSpec {
    pub fn new(family: Family, lambda: f64, mu: f64) -> Result<Self> {
        let s = WeightSpec {
            family,
            lambda: Lambda(lambda),
            mu: Mu(mu),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn family_i(k: f64, lambda: f64, mu: f64) -> Result<Self> {
        Self::new(Family::I { k }, lambda, mu)
    }

    pub fn family_iii(b: f64, lambda: f64, mu: f64) -> Result<Self> {
        Self::new(Family::III { b }, lambda, mu)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.lambda.0;
        if !(l == 0.0 || (l.is_finite() && l > 1.0)) {
            return Err(Error::InvalidWeight(format!("λ = {l} must be > 1 (or 0)")));
        }
        if !(self.mu.0.is_finite() && self.mu.0 >= 1.0) {
            return Err(Error::InvalidWeight(format!("μ = {} must be ≥ 1", self.mu.0)));
        }
        match &self.family {
            Family::I { k } if !(k.is_finite() && *k >= 0.5) => {
                Err(Error::InvalidWeight(format!("family I needs k ≥ 1/2, got {k}")))
            }
            Family::II { s0, c, x0 } if !(s0.is_finite() && c.is_finite() && !x0.is_empty()) => {
                Err(Error::InvalidWeight("family II needs finite s0, c and x0".into()))
            }
            Family::III { b } if !(b.is_finite() && *b > 0.0) => {
                Err(Error::InvalidWeight(format!("family III needs b > 0, got {b}")))
            }
            _ => Ok(()),
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.family.clone(), lambda, self.mu.0)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.family.clone(), self.lambda.0, mu)
    }
}

impl TryFrom<WeightConfig> for WeightSpec {
    type Error = Error;

    fn try_from(c: WeightConfig) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("weight family {:?} needs `{name}`", c.family)))
        };
        let family = match c.family {
            FamilyTag::I => Family::I { k: need(c.k, "k")? },
            FamilyTag::II => Family::II {
                s0: need(c.s0, "s0")?,
                c: need(c.c, "c")?,
                x0: c
                    .x0
                    .clone()
                    .ok_or_else(|| Error::Config("weight family II needs `x0`".into()))?,
            },
            FamilyTag::III => Family::III { b: need(c.b, "b")? },
        };
        WeightSpec::new(family, c.lambda, c.mu)
    }
}

impl From<WeightSpec> for WeightConfig {
    fn from(s: WeightSpec) -> Self {
        let mut c = WeightConfig {
            family: s.family.tag(),
            lambda: s.lambda.0,
            mu: s.mu.0,
            k: None,
            s0: None,
            c: None,
            x0: None,
            b: None,
        };
        match s.family {
            Family::I { k } => c.k = Some(k),
            Family::II { s0, c: cc, x0 } => {
                c.s0 = Some(s0);
                c.c = Some(cc);
                c.x0 = Some(x0);
            }
            Family::III { b } => c.b = Some(b),
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let s = WeightSpec::family_iii(1.0, 8.0, 2.0).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"family":"III","lambda":8.0,"mu":2.0,"b":1.0}"#);
        let back: WeightSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let bad: std::result::Result<WeightSpec, _> =
            serde_json::from_str(r#"{"family":"I","lambda":8.0,"mu":2.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(WeightSpec::family_iii(1.0, 1.0, 2.0).is_err());
        assert!(WeightSpec::family_iii(1.0, 0.0, 2.0).is_ok());
        assert!(WeightSpec::family_iii(1.0, 3.0, 0.9).is_err());
        assert!(WeightSpec::family_i(0.4, 3.0, 2.0).is_err());
        assert!(WeightSpec::family_i(0.5, 3.0, 2.0).is_ok());
    }
}
