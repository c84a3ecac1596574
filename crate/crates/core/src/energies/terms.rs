use serde::{Deserialize, Serialize};

use super::catalog;
use super::ctx::{ds, dx, Ctx};
use crate::conjugation::{field_point, OperatorParams, ZPoint};
use crate::fields::{QuadratureGrid, TestField};
use crate::jet::JetSpace;
use crate::weights::{WeightField, WeightPoint};
use crate::Result;

/// A₁…A₄ at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LowOrderEnergies {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl LowOrderEnergies {
    pub fn from_bundles(w: &WeightField, params: &OperatorParams, wp: &WeightPoint, z: &ZPoint) -> Self {
        let (l, m, phi) = (w.lambda(), w.mu(), wp.phi);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let gz2 = dot(&z.grad, &z.grad);
        let ez = dot(&wp.grad_eta, &z.grad);
        let hz2: f64 = z.hess.iter().flatten().map(|x| x * x).sum();
        let glz2 = dot(&z.grad_lap, &z.grad_lap);
        let eglz = dot(&wp.grad_eta, &z.grad_lap);
        LowOrderEnergies {
            a1: l.powi(3) * m.powi(5) * phi.powi(3) * (m + l * phi)
                * (gz2 + (l * m * phi).powi(2) * z.z * z.z + l * phi * ez * ez),
            a2: l * m.powi(3) * phi * (m + l * phi) * hz2,
            a3: (params.beta * l).powi(2) * m.powi(3) * phi * phi * z.z_s * z.z_s,
            a4: m * glz2 + l * m * phi * eglz * eglz,
        }
    }

    pub fn total(&self) -> f64 {
        self.a1 + self.a2 + self.a3 + self.a4
    }
}

pub fn low_order_terms(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    p: &[f64],
) -> Result<LowOrderEnergies> {
    let wp = w.point(p)?;
    Ok(LowOrderEnergies::from_bundles(w, params, &wp, &field_point(z, p)))
}

/// ∫A₁, …, ∫A₄ over the grid.
pub fn low_order_integrals(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    grid: &QuadratureGrid,
) -> LowOrderEnergies {
    let v = grid.integrate_many(4, |p, out| {
        if let Ok(e) = low_order_terms(w, params, z, p) {
            out.copy_from_slice(&[e.a1, e.a2, e.a3, e.a4]);
        }
    });
    LowOrderEnergies {
        a1: v[0],
        a2: v[1],
        a3: v[2],
        a4: v[3],
    }
}

/// Coefficient budget of the space-derivative estimate at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    /// B₁…B₄.
    pub b: [f64; 4],
    /// H₁…H₄.
    pub h: [f64; 4],
    /// Remainder ℛ.
    pub remainder: f64,
    /// A₅, present only when the point lies on a spatial face.
    pub a5: Option<f64>,
}

pub fn budget_from_ctx(c: &Ctx<'_>, on_boundary: bool) -> EnergyBudget {
    let (l, m) = (c.lambda, c.mu);
    let phi = &c.phi;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let (l1, l2, l4) = (c.lx(1), c.lx(2), c.lx(4));
    let (e1, e2) = (dx(&c.eta, 1), dx(&c.eta, 2));
    let a = c.a();
    let da_l = dx(&a, 1) * &l1;
    let cphi = &c.cphi;
    let cz = &c.cz;
    let b1 = -8.0 * (&a * &da_l) - 2.0 * (&a * &l4) - 2.0 * (&a * cphi);
    let b2 = 4.0 * &da_l + &l4 + cphi;
    let b3 = 4.0 * (a.square() * &da_l) + a.square() * &l4 + a.square() * cphi;
    let b4 = 8.0 * l * m * m * (&a * phi * e1.square()) + 16.0 * &da_l - 4.0 * &l4 - 4.0 * cphi;
    let h1 = 8.0 * (&l2 * z3.square()) - cz * &e2 * z3.square();
    let h2 = 8.0 * l * m * (a.square() * phi * &e2 * z1.square()) - a.square() * cz * &e2 * z1.square();
    let h3 = 32.0 * (&l2 * (&z2 * &l1).square()) + 4.0 * (cz * (&z2 * &e2) * (&z2 * l1.square()));
    let h4 = -16.0 * (&a * &l2 * &z2 * &z2) + 2.0 * (&a * cz * (&z2 * &e2) * &z2);
    let a5 = on_boundary.then(|| {
        let (p0, lam_phi) = (phi.value(), l * phi.value());
        let lap = z2.value();
        l * l * m * m * p0 * p0 * (lam_phi + m) * lap * lap
            + (lam_phi + m) * z3.value().powi(2)
            + l * l * m.powi(3) * p0 * p0 * lap * lap
            + l.sqrt() * m * p0.sqrt() * z3.value().powi(2)
    });
    EnergyBudget {
        b: [b1.value(), b2.value(), b3.value(), b4.value()],
        h: [h1.value(), h2.value(), h3.value(), h4.value()],
        remainder: catalog::remainder(c).value(),
        a5,
    }
}

pub fn bh_terms(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    p: &[f64],
) -> Result<EnergyBudget> {
    let sp = JetSpace::new(2, 4);
    let c = Ctx::from_z(&sp, w, params, z, p)?;
    let l = w.domain.lengths[0];
    Ok(budget_from_ctx(&c, p[1] == 0.0 || p[1] == l))
}

/// Flux quantities at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFluxes {
    /// M₁, M₂, M₃.
    pub m: [f64; 3],
    /// V₁ … V₉ (x-components).
    pub v: [f64; 9],
    /// V = Σ₁⁸ Vⱼ − λ³μ⁴V₈ + V₉.
    pub v_total: f64,
    /// u = φ^{3/2}η′²v when z = θ̃v.
    pub u: Option<f64>,
}

impl BoundaryFluxes {
    pub fn m_total(&self) -> f64 {
        self.m.iter().sum()
    }
}

/// M₁, M₂, M₃ as jets.
pub(crate) fn m_jets<'a>(c: &Ctx<'a>) -> [crate::jet::Jet<'a>; 3] {
    let (al, be) = (c.alpha, c.beta);
    let z = &c.z;
    let zs = ds(z, 1);
    let zsx = dx(&zs, 1);
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l1, l2, l3) = (c.lx(1), c.lx(2), c.lx(3));
    let lsxx = dx(&ds(&c.l, 1), 2);
    let a = c.a();
    let f = c.f();
    let m1 = 0.5 * (al * be * zs.square() + al * z2.square() + al * (a.square() * z.square()))
        - al * (&a * z1.square())
        - 2.0 * al * (&l1 * &z1).square();
    let m2 = 4.0 * be * (&l1 * &zsx * &z2) + 4.0 * be * (&l2 * &z2 * &zs) + 4.0 * be * (&l3 * &z1 * &zs)
        - be * (&lsxx * z1.square())
        - 2.0 * be * (&zs * &l2 * &z2)
        - 2.0 * be * (&lsxx * &z1 * &z1)
        + 4.0 * be * (&l2 * &z1 * &zsx)
        - 4.0 * be * (&a * &l1 * &z1 * &zs)
        + be * (&f * &zs * z)
        - 0.5 * be * (ds(&f, 1) * z.square());
    let (m3, _) = catalog::m3_v3(c);
    [m1, m2, m3]
}

/// V₁ … V₉ as jets.
pub(crate) fn v_jets<'a>(c: &Ctx<'a>) -> [crate::jet::Jet<'a>; 9] {
    let (al, be) = (c.alpha, c.beta);
    let (l, m) = (c.lambda, c.mu);
    let z = &c.z;
    let zs = ds(z, 1);
    let zss = ds(z, 2);
    let zsx = dx(&zs, 1);
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let (l1, l2, l3) = (c.lx(1), c.lx(2), c.lx(3));
    let lsx = dx(&ds(&c.l, 1), 1);
    let lsxx = dx(&lsx, 1);
    let a = c.a();
    let phi = &c.phi;
    let (e1, e2) = (dx(&c.eta, 1), dx(&c.eta, 2));
    let v1 = al * (&zs * &z3) - al * (&zsx * &z2) + 2.0 * al * (&a * &zs * &z1)
        + 4.0 * al * (&zs * (&l1 * &z1) * &l1);
    let v2 = -4.0 * be * (&z2 * (&zss * &l1 + &lsx * &zs)) - 4.0 * be * ((&l1 * &zsx) * &zsx)
        + 2.0 * be * (&l1 * zsx.square())
        - 4.0 * be * (&l2 * &zsx * &zs)
        - 4.0 * be * (&l2 * &z1 * &zss)
        + 2.0 * be * (&zs * &l2 * &zsx)
        + 2.0 * be * (&lsxx * &z1 * &zs)
        + be * ((2.0 * (&a * &l1) - &l3) * zs.square());
    let (_, v3) = catalog::m3_v3(c);
    let w = phi.powf(1.5) * e1.square() * z;
    let w1 = dx(&w, 1);
    let v8 = 2.0 * (&l1 * w1.square()) + 2.0 * (&l2 * &w * &w1) + 2.0 * (l1.powi(3) * w.square());
    let lmf = l * m * phi;
    let v9 = 32.0 * (&lmf * &l1 * (&z2 * &e2) * &z1 * &l1)
        - 32.0 * (&lmf * &e2 * (&z1 * &l1) * (&z2 * &l1))
        - 16.0 * m * (&a * &lmf * &e1 * &z1 * &e1 * &z2)
        - 8.0 * (&a * dx(&a, 1) * &l1 * z * &z1)
        + 2.0 * be * l.powi(3) * m.powf(3.5) * (&a * phi.powi(3) * e1.powi(4) * z * &z1);
    [v1, v2, v3, catalog::v4(c), catalog::v5(c), catalog::v6(c), catalog::v7(c), v8, v9]
}

pub fn fluxes_from_ctx(c: &Ctx<'_>) -> BoundaryFluxes {
    let m = m_jets(c).map(|j| j.value());
    let v = v_jets(c).map(|j| j.value());
    let l3m4 = c.lambda.powi(3) * c.mu.powi(4);
    let v_total = v[..8].iter().sum::<f64>() - l3m4 * v[7] + v[8];
    let u = c.v.as_ref().map(|vj| {
        let e1 = dx(&c.eta, 1).value();
        c.phi.value().powf(1.5) * e1 * e1 * vj.value()
    });
    BoundaryFluxes { m, v, v_total, u }
}

/// Where a flux density is evaluated. `Time` faces carry ±M, `Space` faces
/// carry ±V (the outward normal is −1 on `Lower`, +1 on `Upper`). The face
/// may be any translate of a domain face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FluxFace {
    Time(crate::fields::Side),
    Space(crate::fields::Side),
}

fn sign(s: crate::fields::Side) -> f64 {
    match s {
        crate::fields::Side::Lower => -1.0,
        crate::fields::Side::Upper => 1.0,
    }
}

/// Outward flux density (M·(±1) or V·ν) at `p`.
pub fn boundary_flux(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    face: FluxFace,
    p: &[f64],
) -> Result<f64> {
    let sp = JetSpace::new(2, 5);
    let c = Ctx::from_z(&sp, w, params, z, p)?;
    let f = fluxes_from_ctx(&c);
    Ok(match face {
        FluxFace::Time(s) => sign(s) * f.m_total(),
        FluxFace::Space(s) => sign(s) * f.v_total,
    })
}

/// ∂sM and ∂xV_j at an interior point, by jet differentiation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxDivergence {
    pub ds_m: [f64; 3],
    pub dx_v: [f64; 9],
}

pub fn flux_divergence(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    p: &[f64],
) -> Result<FluxDivergence> {
    let sp = JetSpace::new(2, 6);
    let c = Ctx::from_z(&sp, w, params, z, p)?;
    Ok(FluxDivergence {
        ds_m: m_jets(&c).map(|j| ds(&j, 1).value()),
        dx_v: v_jets(&c).map(|j| dx(&j, 1).value()),
    })
}

/// Pointwise budget integrals over a grid, for diagnostics.
pub fn budget_integrals(
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    grid: &QuadratureGrid,
) -> EnergyBudget {
    let v = grid.integrate_many(9, |p, out| {
        let sp = JetSpace::new(2, 4);
        if let Ok(c) = Ctx::from_z(&sp, w, params, z, p) {
            let b = budget_from_ctx(&c, false);
            out[..4].copy_from_slice(&b.b);
            out[4..8].copy_from_slice(&b.h);
            out[8] = b.remainder;
        }
    });
    EnergyBudget {
        b: [v[0], v[1], v[2], v[3]],
        h: [v[4], v[5], v[6], v[7]],
        remainder: v[8],
        a5: None,
    }
}
