use crate::conjugation::OperatorParams;
use crate::fields::TestField;
use crate::jet::{Jet, JetSpace};
use crate::weights::WeightField;
use crate::{Error, Result};

/// Jet degree used for one-dimensional energy and identity evaluation: fluxes
/// are differentiated once more than the identities themselves, and the
/// deepest chain reaches five x-derivatives of ℓ.
pub const DEGREE: usize = 6;

pub fn jet_space() -> JetSpace {
    JetSpace::new(2, DEGREE)
}

pub(crate) fn dx<'a>(j: &Jet<'a>, n: usize) -> Jet<'a> {
    j.dn(1, n)
}

pub(crate) fn ds<'a>(j: &Jet<'a>, n: usize) -> Jet<'a> {
    j.dn(0, n)
}

/// Jets in (s, x) of z, the weight and the auxiliary coefficients Φ, Z at one
/// point of a one-dimensional problem.
pub struct Ctx<'a> {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub z: Jet<'a>,
    /// The unweighted field when z was built as θ̃v.
    pub v: Option<Jet<'a>>,
    pub l: Jet<'a>,
    pub log_theta: Jet<'a>,
    pub eta: Jet<'a>,
    pub phi: Jet<'a>,
    /// Φ = −βλ³μ^{7/2}φ³η′⁴.
    pub cphi: Jet<'a>,
    /// Z = 8λμφ.
    pub cz: Jet<'a>,
}

impl<'a> Ctx<'a> {
    fn build(
        sp: &'a JetSpace,
        w: &WeightField,
        params: &OperatorParams,
        p: &[f64],
        z: Option<&TestField>,
        v: Option<&TestField>,
    ) -> Result<Self> {
        if w.dim() != 1 {
            return Err(Error::DimensionUnsupported {
                dim: w.dim(),
                what: "energies and identity catalog",
            });
        }
        let wj = w.jets(sp, p)?;
        let (lambda, mu) = (w.lambda(), w.mu());
        let e1 = dx(&wj.eta, 1);
        let cphi = (&wj.phi.powi(3) * &e1.powi(4)) * (-params.beta * lambda.powi(3) * mu.powf(3.5));
        let cz = wj.phi.scale(8.0 * lambda * mu);
        let (zj, vj) = match (z, v) {
            (Some(z), _) => (z.jet(sp, p), None),
            (None, Some(v)) => {
                let vj = v.jet(sp, p);
                (&wj.log_theta.exp() * &vj, Some(vj))
            }
            (None, None) => unreachable!(),
        };
        Ok(Ctx {
            alpha: params.alpha,
            beta: params.beta,
            lambda,
            mu,
            z: zj,
            v: vj,
            l: wj.ell,
            log_theta: wj.log_theta,
            eta: wj.eta,
            phi: wj.phi,
            cphi,
            cz,
        })
    }

    /// Context for a given conjugated field z.
    pub fn from_z(sp: &'a JetSpace, w: &WeightField, params: &OperatorParams, z: &TestField, p: &[f64]) -> Result<Self> {
        Self::build(sp, w, params, p, Some(z), None)
    }

    /// Context for z = θ̃v.
    pub fn from_v(sp: &'a JetSpace, w: &WeightField, params: &OperatorParams, v: &TestField, p: &[f64]) -> Result<Self> {
        Self::build(sp, w, params, p, None, Some(v))
    }

    pub fn zx(&self, n: usize) -> Jet<'a> {
        dx(&self.z, n)
    }

    pub fn lx(&self, n: usize) -> Jet<'a> {
        dx(&self.l, n)
    }

    /// A = ℓ′².
    pub fn a(&self) -> Jet<'a> {
        self.lx(1).square()
    }

    /// Λ = A − ℓ″.
    pub fn cap(&self) -> Jet<'a> {
        self.a() - self.lx(2)
    }

    pub fn e(&self) -> Jet<'a> {
        4.0 * dx(&self.a(), 1) + 4.0 * (self.lx(2) * self.lx(1))
    }

    pub fn f(&self) -> Jet<'a> {
        self.lx(4) - 2.0 * dx(&(self.a() * self.lx(1)), 1)
    }

    pub fn j1(&self) -> Jet<'a> {
        let (a, l1) = (self.a(), self.lx(1));
        self.zx(4) + a.square() * &self.z + 2.0 * (&a * self.zx(2)) + 4.0 * (self.zx(2) * l1.square())
            + self.e() * self.zx(1)
    }

    pub fn j2(&self) -> Jet<'a> {
        let (a, l1, l2) = (self.a(), self.lx(1), self.lx(2));
        -4.0 * (&l1 * self.zx(3)) - 6.0 * (&l2 * self.zx(2)) - 4.0 * (a * &l1 * self.zx(1))
            + self.f() * &self.z
    }

    pub fn p1(&self) -> Jet<'a> {
        self.beta * ds(&self.z, 2) + self.j1()
    }

    pub fn p2(&self) -> Jet<'a> {
        self.alpha * ds(&self.z, 1) + self.j2()
    }

    pub fn pr(&self) -> Jet<'a> {
        let (l1, l2, l3, l4) = (self.lx(1), self.lx(2), self.lx(3), self.lx(4));
        let ls = ds(&self.l, 1);
        let coef = dx(&self.cap(), 2) + 2.0 * (&l1 * &l3) - &l4 + l2.square() - self.alpha * &ls
            + self.beta * ls.square()
            - self.beta * ds(&self.l, 2);
        coef * &self.z - 4.0 * (l3 * self.zx(1)) - 2.0 * self.beta * (ls * ds(&self.z, 1))
    }

    pub fn p3(&self) -> Jet<'a> {
        &self.cphi * &self.z + &self.cz * dx(&self.eta, 2) * self.zx(2)
    }

    /// θP(θ⁻¹z) from the term-by-term expansion.
    pub fn conjugated(&self) -> Jet<'a> {
        let (l1, l2, l3) = (self.lx(1), self.lx(2), self.lx(3));
        let (z, z1, z2, z3, z4) = (&self.z, self.zx(1), self.zx(2), self.zx(3), self.zx(4));
        let ls = ds(&self.l, 1);
        let lss = ds(&self.l, 2);
        let zs = ds(z, 1);
        let cap = self.cap();
        let cap1 = dx(&cap, 1);
        let cap2 = dx(&cap, 2);
        let time = self.alpha * (&zs - &ls * z)
            + self.beta * (ds(z, 2) - 2.0 * (&ls * &zs) + (ls.square() - lss) * z);
        let bi = z4 - 2.0 * (&l3 * &z1) - 4.0 * (&l2 * &z2) - 4.0 * (&l1 * z3)
            + &cap2 * z
            + 2.0 * (&cap1 * &z1)
            + 2.0 * (&cap * &z2)
            + 4.0 * (&l2 * &l1 * &z1)
            + 4.0 * (&z2 * l1.square())
            - 2.0 * (&l1 * &cap1 * z)
            - 4.0 * (&cap * &l1 * &z1)
            + cap.square() * z;
        time + bi
    }
}
