use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::{Interval, SpaceTimeDomain};
use crate::jet::{poly_taylor, series_exp, series_mul, Jet, JetSpace};
use crate::{Error, Result};

/// Derivative orders every generated field supports exactly, per axis
/// (time first). Internally any order can be produced.
pub const ADVERTISED_S_ORDER: usize = 4;
pub const ADVERTISED_X_ORDER: usize = 6;

/// Seed for the field generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

/// Univariate building block with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// sin(freq·t + phase)
    Sin { freq: f64, phase: f64 },
    /// cos(freq·t + phase)
    Cos { freq: f64, phase: f64 },
    /// Σ c_j t^j
    Poly { coeffs: Vec<f64> },
    /// exp(Σ c_j t^j)
    ExpPoly { coeffs: Vec<f64> },
    /// ((t−a)(b−t))^power on [a, b], zero elsewhere
    Window { a: f64, b: f64, power: u32 },
    /// (scale·(t−a)(b−t))^power everywhere
    Bump { a: f64, b: f64, power: u32, scale: f64 },
}

/// Taylor series of (scale·(t−a)(b−t))^power at t, from the factored form so
/// that values near the roots keep full relative accuracy.
fn product_taylor(a: f64, b: f64, power: u32, scale: f64, t: f64, n: usize) -> Vec<f64> {
    let base = series_mul(&[scale * (t - a), scale], &[b - t, -1.0], n);
    let mut c = vec![0.0; n];
    if n > 0 {
        c[0] = 1.0;
    }
    for _ in 0..power {
        c = series_mul(&c, &base, n);
    }
    c
}

impl Primitive {
    /// Taylor coefficients `f^{(k)}(t)/k!`, k < n.
    pub fn taylor(&self, t: f64, n: usize) -> Vec<f64> {
        match self {
            Primitive::Sin { freq, phase } | Primitive::Cos { freq, phase } => {
                let shift = if matches!(self, Primitive::Cos { .. }) {
                    std::f64::consts::FRAC_PI_2
                } else {
                    0.0
                };
                let arg = freq * t + phase + shift;
                let (sn, cs) = arg.sin_cos();
                let mut out = Vec::with_capacity(n);
                let mut fk = 1.0;
                for k in 0..n {
                    let v = match k % 4 {
                        0 => sn,
                        1 => cs,
                        2 => -sn,
                        _ => -cs,
                    };
                    out.push(v * fk);
                    fk *= freq / (k as f64 + 1.0);
                }
                out
            }
            Primitive::Poly { coeffs } => poly_taylor(coeffs, t, n),
            Primitive::ExpPoly { coeffs } => series_exp(&poly_taylor(coeffs, t, n)),
            Primitive::Window { a, b, power } => {
                if t <= *a || t >= *b {
                    vec![0.0; n]
                } else {
                    product_taylor(*a, *b, *power, 1.0, t, n)
                }
            }
            Primitive::Bump { a, b, power, scale } => product_taylor(*a, *b, *power, *scale, t, n),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Primitive::Window { a, b, .. } => vec![*a, *b],
            _ => vec![],
        }
    }
}

/// Product of primitives in one variable.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Factor(pub Vec<Primitive>);

impl Factor {
    pub fn one() -> Self {
        Factor(vec![])
    }

    pub fn taylor(&self, t: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        if n > 0 {
            out[0] = 1.0;
        }
        for p in &self.0 {
            out = series_mul(&out, &p.taylor(t, n), n);
        }
        out
    }

    /// Plain derivatives `f^{(k)}(t)`, k < n.
    pub fn derivs(&self, t: f64, n: usize) -> Vec<f64> {
        let mut d = self.taylor(t, n);
        let mut f = 1.0;
        for (k, x) in d.iter_mut().enumerate() {
            if k > 1 {
                f *= k as f64;
            }
            *x *= f;
        }
        d
    }

    pub fn value(&self, t: f64) -> f64 {
        self.taylor(t, 1)[0]
    }

    fn with(mut self, p: Primitive) -> Self {
        self.0.push(p);
        self
    }
}

/// coef · T(s) · Π_i X_i(x_i)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub time: Factor,
    pub space: Vec<Factor>,
}

/// Space-time field given as a finite sum of separable terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestField {
    pub dim: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialBc {
    None,
    Clamped,
    Hinged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalCondition {
    None,
    /// v and v_s vanish at both slab endpoints.
    VanishEndpointsWithDerivative,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

impl TestField {
    pub fn zero(dim: usize) -> Self {
        TestField { dim, terms: vec![] }
    }

    pub fn single(coef: f64, time: Factor, space: Vec<Factor>) -> Self {
        TestField {
            dim: space.len(),
            terms: vec![Term { coef, time, space }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coef == 0.0)
    }

    pub fn advertised_orders(&self) -> Vec<usize> {
        let mut o = vec![ADVERTISED_X_ORDER; self.dim + 1];
        o[0] = ADVERTISED_S_ORDER;
        o
    }

    /// Exact partial derivative; `orders[0]` is the time order.
    pub fn partial(&self, orders: &[usize], p: &[f64]) -> Result<f64> {
        if orders.len() != self.dim + 1 || p.len() != self.dim + 1 {
            return Err(Error::OrderUnsupported {
                order: orders.to_vec(),
            });
        }
        let adv = self.advertised_orders();
        if orders.iter().zip(&adv).any(|(o, a)| o > a) {
            return Err(Error::OrderUnsupported {
                order: orders.to_vec(),
            });
        }
        Ok(self.partial_unchecked(orders, p))
    }

    pub fn partial_unchecked(&self, orders: &[usize], p: &[f64]) -> f64 {
        let mut sum = 0.0;
        for t in &self.terms {
            let mut v = t.coef * t.time.taylor(p[0], orders[0] + 1)[orders[0]];
            for (i, f) in t.space.iter().enumerate() {
                if v == 0.0 {
                    break;
                }
                let k = orders[i + 1];
                v *= f.taylor(p[i + 1], k + 1)[k];
            }
            sum += v;
        }
        let fact: f64 = orders.iter().map(|&k| factorial(k)).product();
        sum * fact
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.partial_unchecked(&vec![0; self.dim + 1], p)
    }

    /// Taylor jet at `p` in a space with `dim + 1` variables.
    pub fn jet<'a>(&self, sp: &'a JetSpace, p: &[f64]) -> Jet<'a> {
        assert_eq!(sp.nvars(), self.dim + 1, "jet space does not match field");
        let n = sp.degree() + 1;
        let mut j = sp.zero();
        for t in &self.terms {
            let ts = t.time.taylor(p[0], n);
            let xs: Vec<Vec<f64>> = t
                .space
                .iter()
                .enumerate()
                .map(|(i, f)| f.taylor(p[i + 1], n))
                .collect();
            let mut series: Vec<&[f64]> = vec![&ts];
            series.extend(xs.iter().map(|v| v.as_slice()));
            sp.add_separable(&mut j, t.coef, &series);
        }
        j
    }

    /// Points where some factor is only piecewise smooth, per axis.
    pub fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![];
        for t in &self.terms {
            let f = if axis == 0 { &t.time } else { &t.space[axis - 1] };
            for p in &f.0 {
                out.extend(p.breakpoints());
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out.dedup();
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut f = self.clone();
        for t in &mut f.terms {
            t.coef *= c;
        }
        f
    }
}

fn random_primitive(rng: &mut ChaCha8Rng, len: f64) -> Primitive {
    let w = std::f64::consts::PI / len;
    match rng.random_range(0..4) {
        0 => Primitive::Sin {
            freq: w * rng.random_range(0.3..2.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
        1 => Primitive::Cos {
            freq: w * rng.random_range(0.3..2.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
        2 => {
            let deg = rng.random_range(1..=3);
            let c: Vec<f64> = (0..=deg)
                .map(|j| rng.random_range(-1.0..1.0) / len.powi(j))
                .collect();
            Primitive::Poly { coeffs: c }
        }
        _ => Primitive::ExpPoly {
            coeffs: vec![
                0.0,
                rng.random_range(-0.8..0.8) / len,
                rng.random_range(-0.5..0.5) / (len * len),
            ],
        },
    }
}

/// (x(L−x)/L²)², expanded.
fn clamped_envelope(l: f64) -> Primitive {
    Primitive::Bump {
        a: 0.0,
        b: l,
        power: 2,
        scale: 1.0 / (l * l),
    }
}

/// ((s−b1)(b2−s))² scaled to unit maximum.
fn temporal_envelope(b1: f64, b2: f64) -> Primitive {
    let h = 0.5 * (b2 - b1);
    Primitive::Bump {
        a: b1,
        b: b2,
        power: 2,
        scale: 1.0 / (h * h),
    }
}

/// Random manufactured field with the requested boundary behaviour.
/// Clamped fields carry the factor (x(L−x)/L²)² on every axis, hinged fields
/// use sin(kπx/L) spatial factors only, and the temporal condition adds the
/// envelope ((s−b1)(b2−s))².
pub fn random_test_field(
    seed: Seed,
    bc: SpatialBc,
    temporal: TemporalCondition,
    domain: &SpaceTimeDomain,
) -> TestField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let nterms = rng.random_range(4..=12);
    let tlen = domain.b2 - domain.b1;
    let terms = (0..nterms)
        .map(|_| {
            let coef = rng.random_range(-1.0..1.0);
            let mut time = Factor::one().with(random_primitive(&mut rng, tlen));
            if temporal == TemporalCondition::VanishEndpointsWithDerivative {
                time = time.with(temporal_envelope(domain.b1, domain.b2));
            }
            let space = domain
                .lengths
                .iter()
                .map(|&l| match bc {
                    SpatialBc::None => Factor::one().with(random_primitive(&mut rng, l)),
                    SpatialBc::Clamped => Factor::one()
                        .with(random_primitive(&mut rng, l))
                        .with(clamped_envelope(l)),
                    SpatialBc::Hinged => {
                        let k = rng.random_range(1..=4) as f64;
                        Factor::one().with(Primitive::Sin {
                            freq: k * std::f64::consts::PI / l,
                            phase: 0.0,
                        })
                    }
                })
                .collect();
            Term { coef, time, space }
        })
        .collect();
    TestField {
        dim: domain.dim(),
        terms,
    }
}

/// Random field whose support is the box `slab × Π supports[i]`, built from
/// polynomial windows of the given power (C^{power−1} across the edges).
pub fn windowed_test_field(
    seed: Seed,
    slab: Interval,
    supports: &[Interval],
    power: u32,
    domain: &SpaceTimeDomain,
) -> TestField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let nterms = rng.random_range(4..=12);
    let tlen = domain.b2 - domain.b1;
    let norm = |iv: &Interval| (0.5 * iv.len()).powi(2 * power as i32).recip();
    let terms = (0..nterms)
        .map(|_| {
            let coef = rng.random_range(-1.0..1.0) * norm(&slab);
            let time = Factor::one()
                .with(random_primitive(&mut rng, tlen))
                .with(Primitive::Window {
                    a: slab.lo,
                    b: slab.hi,
                    power,
                });
            let mut c = coef;
            let space = supports
                .iter()
                .zip(&domain.lengths)
                .map(|(iv, &l)| {
                    c *= norm(iv);
                    Factor::one()
                        .with(random_primitive(&mut rng, l))
                        .with(Primitive::Window {
                            a: iv.lo,
                            b: iv.hi,
                            power,
                        })
                })
                .collect();
            Term {
                coef: c,
                time,
                space,
            }
        })
        .collect();
    TestField {
        dim: domain.dim(),
        terms,
    }
}

/// Clamped, temporally conditioned field supported in `[0, gap.lo] ∪
/// [gap.hi, L]` (1-D), i.e. vanishing on the window `gap`.
pub fn exterior_test_field(seed: Seed, gap: Interval, domain: &SpaceTimeDomain) -> TestField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let l = domain.lengths[0];
    let nterms = rng.random_range(4..=12);
    let tlen = domain.b2 - domain.b1;
    let terms = (0..nterms)
        .map(|_| {
            let (a, b) = if rng.random_bool(0.5) {
                (0.0, gap.lo)
            } else {
                (gap.hi, l)
            };
            let h = 0.5 * (b - a);
            let time = Factor::one()
                .with(random_primitive(&mut rng, tlen))
                .with(temporal_envelope(domain.b1, domain.b2));
            let space = vec![Factor::one()
                .with(random_primitive(&mut rng, l))
                .with(Primitive::Window { a, b, power: 5 })];
            Term {
                coef: rng.random_range(-1.0..1.0) / h.powi(10),
                time,
                space,
            }
        })
        .collect();
    TestField { dim: 1, terms }
}
