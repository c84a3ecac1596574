//! Exact pointwise identities behind the energy estimates, one-dimensional
//! space. Each entry evaluates its left side and the list of right-side terms
//! with every divergence and ∂s expanded by jet differentiation.

use serde::{Deserialize, Serialize};

use super::ctx::{ds, dx, jet_space, Ctx};
use crate::conjugation::OperatorParams;
use crate::fields::TestField;
use crate::jet::Jet;
use crate::par;
use crate::weights::WeightField;
use crate::{Error, Result};

pub const CATALOG: [&str; 11] = [
    "as0", "0227-0as0", "i11i21", "1208-2b", "1208-b", "1208-3a", "1208-11a", "1209-06", "1209-b1",
    "i1i22", "1210-a0",
];

/// Left side and right-side terms of one identity at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityValue {
    pub lhs: f64,
    pub rhs_terms: Vec<f64>,
}

impl IdentityValue {
    fn new(lhs: Jet<'_>, rhs: Vec<Jet<'_>>) -> Self {
        IdentityValue {
            lhs: lhs.value(),
            rhs_terms: rhs.iter().map(|j| j.value()).collect(),
        }
    }

    pub fn rhs(&self) -> f64 {
        crate::numeric::neumaier_sum(self.rhs_terms.iter().copied())
    }

    /// |lhs − rhs| / (|lhs| + Σ|rhs terms|), 0 when every term vanishes.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.lhs.abs() + self.rhs_terms.iter().map(|x| x.abs()).sum::<f64>();
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs()).abs() / scale
        }
    }
}

pub fn evaluate(id: &str, c: &Ctx<'_>) -> Result<IdentityValue> {
    Ok(match id {
        "as0" => IdentityValue::new(c.conjugated(), vec![c.p1(), c.p2(), c.pr()]),
        "0227-0as0" => {
            let p1 = c.p1();
            let p3 = c.p3();
            let p4 = c.pr() - &p3;
            IdentityValue::new(
                c.conjugated() * &p1,
                vec![p1.square(), c.p2() * &p1, p3 * &p1, p4 * &p1],
            )
        }
        "i11i21" => i11i21(c),
        "1208-2b" => id_1208_2b(c),
        "1208-b" => id_1208_b(c),
        "1208-3a" => id_1208_3a(c),
        "1208-11a" => id_1208_11a(c),
        "1209-06" => id_1209_06(c),
        "1209-b1" => id_1209_b1(c),
        "i1i22" => i1i22(c),
        "1210-a0" => id_1210_a0(c),
        other => return Err(Error::UnknownIdentity(other.to_string())),
    })
}

/// Max relative residual of identity `id` over `points` for the field z.
pub fn check_identity(
    id: &str,
    w: &WeightField,
    params: &OperatorParams,
    z: &TestField,
    points: &[Vec<f64>],
) -> Result<f64> {
    if !CATALOG.contains(&id) {
        return Err(Error::UnknownIdentity(id.to_string()));
    }
    let res = par::map_slice(points, |p| -> Result<f64> {
        let sp = jet_space();
        let c = Ctx::from_z(&sp, w, params, z, p)?;
        Ok(evaluate(id, &c)?.relative_residual())
    });
    res.into_iter().try_fold(0.0f64, |m, r| r.map(|x| m.max(x)))
}

fn i11i21(c: &Ctx<'_>) -> IdentityValue {
    let (al, be) = (c.alpha, c.beta);
    let z = &c.z;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let zs = ds(z, 1);
    let zss = ds(z, 2);
    let zsx = dx(&zs, 1);
    let (l1, l2) = (c.lx(1), c.lx(2));
    let a = c.a();
    let lhs = al * be * (&zs * &zss) + al * (&zs * c.j1());
    let rhs = vec![
        0.5 * ds(&(al * be * zs.square()), 1),
        dx(&(al * (&zs * &z3) - al * (&zsx * &z2)), 1),
        0.5 * ds(&(al * z2.square() + al * (a.square() * z.square())), 1),
        -al * (&a * ds(&a, 1) * z.square()),
        dx(&(2.0 * al * (&a * &zs * &z1)), 1),
        -ds(&(al * (&a * z1.square())), 1),
        al * (ds(&a, 1) * z1.square()),
        -2.0 * al * (&zs * dx(&a, 1) * &z1),
        dx(&(4.0 * al * (&zs * &l1 * &z1 * &l1)), 1),
        -4.0 * al * (&l1 * &z1 * &l1 * &zsx),
        -4.0 * al * (&zs * &l2 * &l1 * &z1),
        -4.0 * al * (&l2 * &zs * &l1 * &z1),
        al * (&zs * c.e() * &z1),
    ];
    IdentityValue::new(lhs, rhs)
}

fn id_1208_2b(c: &Ctx<'_>) -> IdentityValue {
    let be = c.beta;
    let zs = ds(&c.z, 1);
    let zss = ds(&c.z, 2);
    let zsx = dx(&zs, 1);
    let (z2, z3) = (c.zx(2), c.zx(3));
    let (l1, l2, l3, l4) = (c.lx(1), c.lx(2), c.lx(3), c.lx(4));
    let lsx = dx(&ds(&c.l, 1), 1);
    let lhs = -4.0 * be * (&zss * &l1 * &z3);
    let rhs = vec![
        dx(
            &(-4.0 * be * (&zss * &l1 * &z2) - 4.0 * be * (&lsx * &z2 * &zs)
                - 4.0 * be * (&l1 * &zsx * &zsx)
                + 2.0 * be * (&l1 * zsx.square())
                - 4.0 * be * (&l2 * &zsx * &zs)
                + 2.0 * be * (&l3 * zs.square())),
            1,
        ),
        ds(&(4.0 * be * (&l1 * &zsx * &z2) + 4.0 * be * (&l2 * &z2 * &zs)), 1),
        4.0 * be * (&lsx * &z3 * &zs),
        4.0 * be * (&l2 * zsx.square()),
        2.0 * be * (&l2 * zsx.square()),
        -2.0 * be * (&l4 * zs.square()),
    ];
    IdentityValue::new(lhs, rhs)
}

fn id_1208_b(c: &Ctx<'_>) -> IdentityValue {
    let be = c.beta;
    let zs = ds(&c.z, 1);
    let zss = ds(&c.z, 2);
    let zsx = dx(&zs, 1);
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l2, l3, l4) = (c.lx(2), c.lx(3), c.lx(4));
    let ls = ds(&c.l, 1);
    let lss = ds(&c.l, 2);
    let lhs = -4.0 * be * (&zss * &l2 * &z2);
    let rhs = vec![
        -4.0 * be * dx(&(&l2 * &z1 * &zss), 1),
        4.0 * be * ds(&(&l3 * &z1 * &zs), 1),
        -4.0 * be * (dx(&ls, 3) * &z1 * &zs),
        -2.0 * be * dx(&(&l3 * zs.square()), 1),
        2.0 * be * (&l4 * zs.square()),
        ds(&(4.0 * be * (&l2 * &z1 * &zsx)), 1),
        -4.0 * be * (&l2 * zsx.square()),
        -2.0 * be * ds(&(dx(&ls, 2) * z1.square()), 1),
        2.0 * be * (dx(&lss, 2) * z1.square()),
    ];
    IdentityValue::new(lhs, rhs)
}

fn id_1208_3a(c: &Ctx<'_>) -> IdentityValue {
    let be = c.beta;
    let zs = ds(&c.z, 1);
    let zss = ds(&c.z, 2);
    let zsx = dx(&zs, 1);
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l2, l3, l4) = (c.lx(2), c.lx(3), c.lx(4));
    let ls = ds(&c.l, 1);
    let lss = ds(&c.l, 2);
    let lhs = -2.0 * be * (&zss * &l2 * &z2);
    let rhs = vec![
        -2.0 * be * ds(&(&zs * &l2 * &z2), 1),
        2.0 * be * dx(&(dx(&ls, 2) * &z1 * &zs), 1),
        -2.0 * be * (&zs * dx(&ls, 3) * &z1),
        -be * ds(&(dx(&ls, 2) * z1.square()), 1),
        be * (dx(&lss, 2) * z1.square()),
        2.0 * be * dx(&(&zs * &l2 * &zsx), 1),
        -2.0 * be * (&l2 * zsx.square()),
        -be * dx(&(&l3 * zs.square()), 1),
        be * (&l4 * zs.square()),
    ];
    IdentityValue::new(lhs, rhs)
}

/// (M₃, V₃) of the β z_ss P₃ identity.
pub(crate) fn m3_v3<'a>(c: &Ctx<'a>) -> (Jet<'a>, Jet<'a>) {
    let be = c.beta;
    let z = &c.z;
    let zs = ds(z, 1);
    let zsx = dx(&zs, 1);
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (e2, e3) = (dx(&c.eta, 2), dx(&c.eta, 3));
    let (cphi, cz) = (&c.cphi, &c.cz);
    let czs = ds(cz, 1);
    let m3 = be * (cphi * &zs * z) - 0.5 * be * (ds(cphi, 1) * z.square())
        + be * (cz * &zs * &e2 * &z2)
        + 0.5 * be * (&czs * &e2 * z1.square());
    let v3 = -be * (&czs * &zs * &e2 * &z1) - be * (cz * &zs * &e2 * &zsx)
        + 0.5 * be * (&e2 * dx(cz, 1) * zs.square())
        + 0.5 * be * (cz * &e3 * zs.square());
    (m3, v3)
}

fn id_1208_11a(c: &Ctx<'_>) -> IdentityValue {
    let be = c.beta;
    let z = &c.z;
    let zs = ds(z, 1);
    let zss = ds(z, 2);
    let zsx = dx(&zs, 1);
    let z1 = c.zx(1);
    let (e2, e3) = (dx(&c.eta, 2), dx(&c.eta, 3));
    let (cphi, cz) = (&c.cphi, &c.cz);
    let czs = ds(cz, 1);
    let (m3, v3) = m3_v3(c);
    let lhs = be * (&zss * c.p3());
    let rhs = vec![
        ds(&m3, 1),
        dx(&v3, 1),
        -0.5 * be * ((2.0 * cphi + dx(&(&e2 * dx(cz, 1)), 1) + dx(&(cz * &e3), 1)) * zs.square()),
        0.5 * be * (ds(cphi, 2) * z.square()),
        be * (&zs * &e2 * dx(&czs, 1) * &z1),
        -0.5 * be * (ds(&czs, 1) * &e2 * z1.square()),
        be * (&czs * &zs * &e3 * &z1),
        be * (cz * &e2 * zsx.square()),
    ];
    IdentityValue::new(lhs, rhs)
}

pub(crate) fn v4<'a>(c: &Ctx<'a>) -> Jet<'a> {
    let z = &c.z;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let (l1, l2, l3) = (c.lx(1), c.lx(2), c.lx(3));
    let a = c.a();
    let da = dx(&a, 1);
    let f = c.f();
    -4.0 * (&z3 * (&l1 * &z3)) + 2.0 * (&l1 * z3.square()) - 4.0 * (&z3 * (&l2 * &z2))
        + 4.0 * (&z2 * &da * (&l1 * &z1))
        + 4.0 * (&l2 * (&z2 * &z3))
        - 4.0 * (&z2 * (&l2 * &z3))
        - 2.0 * (&l2 * &z2 * &z3)
        - 4.0 * (&z3 * (&a * &l1 * &z1))
        + 4.0 * (&a * &l2 * &z1 * &z2)
        + 4.0 * (&a * &z2 * &l1 * &z2)
        - 2.0 * (&a * &l1 * z2.square())
        - 4.0 * (&z2 * &z1 * &da * &l1)
        + 4.0 * (&z2 * &l1 * &z1 * &da)
        - 4.0 * (&a * &l2 * (&z1 * &z2))
        + 2.0 * (&da * &l2 * z1.square())
        + 4.0 * (&a * &l2 * &z2 * &z1)
        + &f * &z3 * z
        - &f * &z2 * &z1
        - 4.0 * (&z2 * &l3 * &z2)
        + 4.0 * (&a * z * &z2 * &l3)
}

fn id_1209_06(c: &Ctx<'_>) -> IdentityValue {
    let z = &c.z;
    let (z1, z2, z3, z4) = (c.zx(1), c.zx(2), c.zx(3), c.zx(4));
    let (l1, l2, l3, l4) = (c.lx(1), c.lx(2), c.lx(3), c.lx(4));
    let a = c.a();
    let da = dx(&a, 1);
    let dda = dx(&a, 2);
    let f = c.f();
    let df = dx(&f, 1);
    let r1 = 6.0 * (&z3 * &l3 * &z2) + 4.0 * (&z2 * &l4 * &z2) + 8.0 * (&l3 * &z2 * &z3)
        - 4.0 * (&dda * (&l1 * &z1) * &z2)
        - 4.0 * (&a * &l3 * &z1 * &z2)
        - 8.0 * (&l2 * &da * &z1 * &z2)
        - 4.0 * (z * &z2 * &da * &l3)
        - 4.0 * (&a * z * &z3 * &l3)
        - 4.0 * (&a * z * &z2 * &l4)
        - 4.0 * (&a * &l3 * &z2 * &z1)
        + 4.0 * (&l2 * &z2 * &z1 * &da)
        + 4.0 * (&z2 * &dda * &z1 * &l1)
        - 8.0 * (&z2 * &l2 * &z1 * &da)
        - 4.0 * (&z2 * &l1 * (&dda * &z1))
        - &df * &z3 * z
        + &df * &z1 * &z2
        - 2.0 * (dx(&(&da * &l2), 1) * z1.square());
    let lhs = &z4 * c.j2();
    let rhs = vec![
        dx(&v4(c), 1),
        8.0 * (&l2 * z3.square()),
        2.0 * (dx(&(&a * &l1), 1) * z2.square()),
        &f * z2.square(),
        -8.0 * ((&z2 * &l1) * (&z2 * &da)),
        -8.0 * (&a * &z2 * (&l2 * &z2)),
        r1,
    ];
    IdentityValue::new(lhs, rhs)
}

pub(crate) fn v5<'a>(c: &Ctx<'a>) -> Jet<'a> {
    let z = &c.z;
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l1, l2) = (c.lx(1), c.lx(2));
    let a = c.a();
    let a2 = a.square();
    let f = c.f();
    -4.0 * (&a2 * z * &z2 * &l1) + 2.0 * (&a2 * &l1 * z1.square()) - 2.0 * (&a2 * &l2 * z * &z1)
        - 2.0 * (a.powi(3) * &l1 * z.square())
        + 4.0 * (z * dx(&a2, 1) * (&z1 * &l1))
        - 4.0 * (&a * &l1 * z2.square())
        - 8.0 * (&a2 * &z1 * (&l1 * &z1))
        + 4.0 * (&a2 * &l1 * z1.square())
        + 2.0 * (&a * &f * z * &z1)
}

fn id_1209_b1(c: &Ctx<'_>) -> IdentityValue {
    let z = &c.z;
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l1, l2) = (c.lx(1), c.lx(2));
    let a = c.a();
    let a2 = a.square();
    let da2 = dx(&a2, 1);
    let f = c.f();
    let j2 = c.j2();
    let r2 = -4.0 * (z * (&z1 * &l1) * dx(&a2, 2)) - 4.0 * (z * (&l2 * &z1 * &da2))
        + 2.0 * (dx(&(&a2 * &l2), 1) * &z1 * z)
        - 2.0 * (dx(&(&a * &f), 1) * &z1 * z);
    let lhs = &a2 * z * &j2 + 2.0 * (&a * &z2 * &j2);
    let rhs = vec![
        dx(&v5(c), 1),
        -2.0 * (&da2 * &l1 * z1.square()),
        -2.0 * (&a * &f * z1.square()),
        2.0 * (dx(&(a.powi(3) * &l1), 1) * z.square()),
        &a2 * &f * z.square(),
        4.0 * (dx(&(&a * &l1), 1) * z2.square()),
        -4.0 * (&a * &l2 * z2.square()),
        8.0 * (&a2 * &l2 * z1.square()),
        4.0 * ((&da2 * &z1) * (&l1 * &z1)),
        -4.0 * (dx(&(&a2 * &l1), 1) * z1.square()),
        -8.0 * (&a * &l2 * &z2 * &z2),
        r2,
    ];
    IdentityValue::new(lhs, rhs)
}

pub(crate) fn v6<'a>(c: &Ctx<'a>) -> Jet<'a> {
    let z = &c.z;
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l1, l2) = (c.lx(1), c.lx(2));
    let a = c.a();
    let e = c.e();
    let f = c.f();
    -16.0 * (&z2 * &l1 * &l1 * &z2 * &l1) + 8.0 * ((&z2 * &l1).square() * &l1)
        - 8.0 * (&a * &l1 * (&l1 * &z1).square())
        - 8.0 * (&l2 * &z2 * (&z1 * &l1) * &l1)
        + 8.0 * (&l2 * (&z2 * &l1) * (&z1 * &l1))
        - 4.0 * ((&e * &z1) * &z2 * &l1)
        + 4.0 * (&f * z * (&z1 * &l1) * &l1)
}

fn i1i22(c: &Ctx<'_>) -> IdentityValue {
    let z = &c.z;
    let (z1, z2) = (c.zx(1), c.zx(2));
    let (l1, l2, l3) = (c.lx(1), c.lx(2), c.lx(3));
    let a = c.a();
    let da = dx(&a, 1);
    let e = c.e();
    let f = c.f();
    let j2 = c.j2();
    let r3 = 8.0 * ((&l3 * &l1) * (&z1 * &l1) * &z2) - 4.0 * (&l2 * &z2 * &da * &z1)
        + 8.0 * ((&z2 * &l1 * &l3) * (&l1 * &z1))
        - 8.0 * (&l2 * (&z2 * &l2) * (&l1 * &z1))
        + 16.0 * ((&z2 * &l1) * (dx(&a, 2) * &z1))
        + 8.0 * (&l2 * (&z2 * &l1) * (&l2 * &z1))
        - 4.0 * ((dx(&f, 1) * &l1) * (&z1 * &l1) * z)
        - 4.0 * (&f * &l2 * (&z1 * &l1) * z)
        - 4.0 * (&f * (&l2 * &l1 * &z1) * z)
        + &f * &e * &z1 * z;
    let lhs = 4.0 * (&z2 * &l1 * &l1 * &j2) + &e * &z1 * &j2;
    let rhs = vec![
        dx(&v6(c), 1),
        32.0 * (&l2 * (&z2 * &l1).square()),
        8.0 * ((dx(&(&a * &l1), 1) - 2.0 * (&a * &l2)) * (&l1 * &z1).square()),
        -8.0 * (&a * (&da * &z1) * (&l1 * &z1)),
        8.0 * ((&z2 * &l1) * (&z2 * &da)),
        -4.0 * (&f * (&z1 * &l1).square()),
        r3,
    ];
    IdentityValue::new(lhs, rhs)
}

pub(crate) fn v7<'a>(c: &Ctx<'a>) -> Jet<'a> {
    let z = &c.z;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let l1 = c.lx(1);
    let a = c.a();
    let e2 = dx(&c.eta, 2);
    let (cphi, cz) = (&c.cphi, &c.cz);
    cphi * &z3 * z - cphi * &z2 * &z1 + (cz * &z2 * &e2) * &z3 + a.square() * cz * (&e2 * &z1) * z
        - cz * &e2 * (&z2 * &z3)
        + cz * &z2 * (&e2 * &z3)
        + 2.0 * (&a * cphi * z * &z1)
        + 4.0 * (cphi * z * (&z1 * &l1) * &l1)
}

/// ℛ, the remainder collected from J₁·J₃.
pub(crate) fn remainder<'a>(c: &Ctx<'a>) -> Jet<'a> {
    let z = &c.z;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let (l1, l2) = (c.lx(1), c.lx(2));
    let a = c.a();
    let a2 = a.square();
    let e = c.e();
    let (e2, e3) = (dx(&c.eta, 2), dx(&c.eta, 3));
    let (cphi, cz) = (&c.cphi, &c.cz);
    let dphi = dx(cphi, 1);
    let dze2 = dx(&(cz * &e2), 1);
    -(&dphi * &z3 * z) + &dphi * &z1 * &z2 - 2.0 * (dx(&(&a * cphi), 1) * &z1 * z)
        + cphi * &e * &z1 * z
        - (&e2 * dx(&(&a2 * cz), 1)) * &z1 * z
        - &a2 * cz * (&e3 * &z1) * z
        + cz * (&z2 * &e2) * (&e * &z1)
        - 4.0 * ((&dphi * &l1) * (&z1 * &l1) * z)
        - 4.0 * (cphi * &l2 * (&z1 * &l1) * z)
        - 4.0 * (cphi * (&l2 * &l1 * &z1) * z)
        - &dze2 * &z3 * &z2
}

fn id_1210_a0(c: &Ctx<'_>) -> IdentityValue {
    let z = &c.z;
    let (z1, z2, z3) = (c.zx(1), c.zx(2), c.zx(3));
    let l1 = c.lx(1);
    let a = c.a();
    let a2 = a.square();
    let e2 = dx(&c.eta, 2);
    let (cphi, cz) = (&c.cphi, &c.cz);
    let rc = remainder(c);
    let j3 = cphi * z + cz * &e2 * &z2;
    let lhs = c.j1() * j3;
    let rhs = vec![
        dx(&v7(c), 1),
        cphi * z2.square(),
        -2.0 * (&a * cphi * z1.square()),
        -(&a2 * cz * &e2 * z1.square()),
        &a2 * cphi * z.square(),
        -(cz * &e2 * z3.square()),
        2.0 * (&a * cz * (&z2 * &e2) * &z2),
        -4.0 * (cphi * (&z1 * &l1).square()),
        4.0 * (cz * (&z2 * &e2) * (&z2 * &l1 * &l1)),
        rc,
    ];
    IdentityValue::new(lhs, rhs)
}
