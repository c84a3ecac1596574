//! Box-truncated bivariate Taylor arrays in (s, x): orders up to 2 in s and
//! 4 in x. This is the fast path for 1-D quadrature sums, where only those
//! partials are needed and the jet machinery would be wasteful.

use std::ops::{Add, Mul, Sub};

pub const NS: usize = 3;
pub const NX: usize = 5;

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// `c[a][b]` is the coefficient of `ds^a dx^b`, i.e. `∂s^a ∂x^b f / (a! b!)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub c: [[f64; NX]; NS],
}

impl Rect {
    pub const ZERO: Rect = Rect {
        c: [[0.0; NX]; NS],
    };

    pub fn constant(v: f64) -> Rect {
        let mut r = Rect::ZERO;
        r.c[0][0] = v;
        r
    }

    /// Product `T(s)·X(x)` of univariate Taylor series.
    pub fn outer(t: &[f64], x: &[f64]) -> Rect {
        let mut r = Rect::ZERO;
        for a in 0..NS.min(t.len()) {
            for b in 0..NX.min(x.len()) {
                r.c[a][b] = t[a] * x[b];
            }
        }
        r
    }

    /// Adds `scale·T(s)·X(x)`.
    pub fn add_outer(&mut self, scale: f64, t: &[f64], x: &[f64]) {
        for a in 0..NS.min(t.len()) {
            let ta = scale * t[a];
            if ta == 0.0 {
                continue;
            }
            for b in 0..NX.min(x.len()) {
                self.c[a][b] += ta * x[b];
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    /// `∂s^a ∂x^b` at the expansion point.
    pub fn partial(&self, a: usize, b: usize) -> f64 {
        self.c[a][b] * FACT[a] * FACT[b]
    }

    pub fn scale(&self, f: f64) -> Rect {
        let mut r = *self;
        for row in r.c.iter_mut() {
            for x in row.iter_mut() {
                *x *= f;
            }
        }
        r
    }

    pub fn shift(&self, a: f64) -> Rect {
        let mut r = *self;
        r.c[0][0] += a;
        r
    }

    pub fn product(&self, o: &Rect) -> Rect {
        let mut r = Rect::ZERO;
        for a1 in 0..NS {
            for b1 in 0..NX {
                let x = self.c[a1][b1];
                if x == 0.0 {
                    continue;
                }
                for a2 in 0..NS - a1 {
                    for b2 in 0..NX - b1 {
                        r.c[a1 + a2][b1 + b2] += x * o.c[a2][b2];
                    }
                }
            }
        }
        r
    }

    /// `exp(self)`.
    pub fn exp(&self) -> Rect {
        let e0 = self.c[0][0].exp();
        let mut h = *self;
        h.c[0][0] = 0.0;
        // h is nilpotent of index NS + NX - 1 in the box
        const TOP: usize = NS + NX - 2;
        let mut r = Rect::constant(1.0 / factorial(TOP));
        for k in (0..TOP).rev() {
            r = r.product(&h);
            r.c[0][0] += 1.0 / factorial(k);
        }
        r.scale(e0)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().flatten().all(|x| x.is_finite())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

impl Add for Rect {
    type Output = Rect;
    fn add(mut self, o: Rect) -> Rect {
        for (r, q) in self.c.iter_mut().zip(o.c.iter()) {
            for (x, y) in r.iter_mut().zip(q.iter()) {
                *x += y;
            }
        }
        self
    }
}

impl Sub for Rect {
    type Output = Rect;
    fn sub(self, o: Rect) -> Rect {
        self + o.scale(-1.0)
    }
}

impl Mul for Rect {
    type Output = Rect;
    fn mul(self, o: Rect) -> Rect {
        self.product(&o)
    }
}
