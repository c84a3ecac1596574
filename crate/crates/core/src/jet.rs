//! Truncated multivariate Taylor series ("jets").
//!
//! A jet stores the Taylor coefficients of a smooth function around a point
//! up to a fixed total degree. Arithmetic on jets is exact for every
//! coefficient up to that degree, so derivatives of products and
//! compositions come out at round-off level without any differencing.
//!
//! Each jet tracks its own valid degree: differentiation lowers it by one
//! and binary operations take the minimum. Reading a derivative beyond the
//! valid degree is a logic error and panics.

use smallvec::SmallVec;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub const MAX_VARS: usize = 3;

type Coeffs = SmallVec<[f64; 36]>;

/// Index tables for jets in `nvars` variables truncated at `degree`.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    degree: usize,
    exps: Vec<[u8; MAX_VARS]>,
    lookup: Vec<u16>,
    mul: Vec<(u16, u16, u16)>,
    diff: Vec<Vec<(u16, u16, f64)>>,
}

impl JetSpace {
    pub fn new(nvars: usize, degree: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars), "jet variables must be 1..=3");
        assert!(degree <= 12, "jet degree too large");
        let mut exps: Vec<[u8; MAX_VARS]> = Vec::new();
        for d in 0..=degree {
            let mut cur = [0u8; MAX_VARS];
            push_graded(nvars, 0, d, &mut cur, &mut exps);
        }
        let base = degree + 1;
        let mut lookup = vec![u16::MAX; base.pow(nvars as u32)];
        let key = |e: &[u8; MAX_VARS]| -> usize {
            let mut k = 0;
            for v in (0..nvars).rev() {
                k = k * base + e[v] as usize;
            }
            k
        };
        for (i, e) in exps.iter().enumerate() {
            lookup[key(e)] = i as u16;
        }
        let deg = |e: &[u8; MAX_VARS]| e.iter().map(|&x| x as usize).sum::<usize>();
        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                if deg(a) + deg(b) <= degree {
                    let mut c = [0u8; MAX_VARS];
                    for v in 0..nvars {
                        c[v] = a[v] + b[v];
                    }
                    mul.push((i as u16, j as u16, lookup[key(&c)]));
                }
            }
        }
        let mut diff = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::new();
            for (i, e) in exps.iter().enumerate() {
                if e[v] > 0 {
                    let mut d = *e;
                    d[v] -= 1;
                    table.push((i as u16, lookup[key(&d)], e[v] as f64));
                }
            }
            diff.push(table);
        }
        JetSpace {
            nvars,
            degree,
            exps,
            lookup,
            mul,
            diff,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent tuple of coefficient `i`.
    pub fn exponent(&self, i: usize) -> &[u8; MAX_VARS] {
        &self.exps[i]
    }

    /// Coefficient index of a multi-index, if it is within the degree.
    pub fn index_of(&self, orders: &[usize]) -> Option<usize> {
        if orders.len() != self.nvars || orders.iter().sum::<usize>() > self.degree {
            return None;
        }
        let base = self.degree + 1;
        let mut k = 0;
        for v in (0..self.nvars).rev() {
            k = k * base + orders[v];
        }
        let i = self.lookup[k];
        (i != u16::MAX).then_some(i as usize)
    }

    pub fn constant(&self, v: f64) -> Jet<'_> {
        let mut c: Coeffs = SmallVec::from_elem(0.0, self.len());
        c[0] = v;
        Jet {
            sp: self,
            deg: self.degree as i32,
            c,
        }
    }

    pub fn zero(&self) -> Jet<'_> {
        self.constant(0.0)
    }

    /// The coordinate function `x_var` expanded around `at`.
    pub fn variable(&self, var: usize, at: f64) -> Jet<'_> {
        assert!(var < self.nvars);
        let mut j = self.constant(at);
        if self.degree >= 1 {
            let mut o = [0usize; MAX_VARS];
            o[var] = 1;
            let i = self.index_of(&o[..self.nvars]).expect("degree >= 1");
            j.c[i] = 1.0;
        }
        j
    }

    /// Jet of a product of univariate functions, one per variable, each given
    /// by its Taylor coefficients (`series[v][k]` is the k-th coefficient in
    /// variable v).
    pub fn separable(&self, series: &[&[f64]]) -> Jet<'_> {
        assert_eq!(series.len(), self.nvars);
        let mut j = self.zero();
        self.add_separable(&mut j, 1.0, series);
        j
    }

    /// Adds `scale * Π_v series[v]` to `jet`.
    pub fn add_separable(&self, jet: &mut Jet<'_>, scale: f64, series: &[&[f64]]) {
        for (i, e) in self.exps.iter().enumerate() {
            let mut p = scale;
            for v in 0..self.nvars {
                let k = e[v] as usize;
                p *= series[v].get(k).copied().unwrap_or(0.0);
            }
            jet.c[i] += p;
        }
    }
}

fn push_graded(
    nvars: usize,
    v: usize,
    remaining: usize,
    cur: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if v == nvars - 1 {
        cur[v] = remaining as u8;
        out.push(*cur);
        cur[v] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[v] = k as u8;
        push_graded(nvars, v + 1, remaining - k, cur, out);
    }
    cur[v] = 0;
}

/// A truncated Taylor series living in a [`JetSpace`].
#[derive(Clone, Debug)]
pub struct Jet<'a> {
    sp: &'a JetSpace,
    deg: i32,
    c: Coeffs,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

impl<'a> Jet<'a> {
    pub fn space(&self) -> &'a JetSpace {
        self.sp
    }

    /// Highest total degree whose coefficients are exact.
    pub fn valid_degree(&self) -> i32 {
        self.deg
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        assert!(self.deg >= 0, "jet has no valid coefficients left");
        self.c[0]
    }

    /// Partial derivative with the given per-variable orders.
    pub fn partial(&self, orders: &[usize]) -> f64 {
        let total: usize = orders.iter().sum();
        assert!(
            total as i32 <= self.deg,
            "derivative of order {total} requested from jet of valid degree {}",
            self.deg
        );
        let i = self.sp.index_of(orders).expect("order within space degree");
        let f: f64 = orders.iter().map(|&k| factorial(k)).product();
        self.c[i] * f
    }

    /// Derivative with respect to variable `var`.
    pub fn d(&self, var: usize) -> Jet<'a> {
        let mut c: Coeffs = SmallVec::from_elem(0.0, self.sp.len());
        for &(src, dst, f) in &self.sp.diff[var] {
            c[dst as usize] = f * self.c[src as usize];
        }
        Jet {
            sp: self.sp,
            deg: self.deg - 1,
            c,
        }
    }

    /// Repeated derivative.
    pub fn dn(&self, var: usize, n: usize) -> Jet<'a> {
        let mut j = self.clone();
        for _ in 0..n {
            j = j.d(var);
        }
        j
    }

    pub fn scale(&self, f: f64) -> Jet<'a> {
        let mut j = self.clone();
        for x in j.c.iter_mut() {
            *x *= f;
        }
        j
    }

    /// Shifts the constant term.
    pub fn shift(&self, a: f64) -> Jet<'a> {
        let mut j = self.clone();
        j.c[0] += a;
        j
    }

    fn mul_jet(&self, o: &Jet<'a>) -> Jet<'a> {
        debug_assert!(std::ptr::eq(self.sp, o.sp), "jets from different spaces");
        let mut c: Coeffs = SmallVec::from_elem(0.0, self.sp.len());
        for &(i, j, k) in &self.sp.mul {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet {
            sp: self.sp,
            deg: self.deg.min(o.deg),
            c,
        }
    }

    /// `f(self)` where `f` is given by its Taylor coefficients at the
    /// current value (`taylor[k] = f^{(k)}(a0)/k!`).
    pub fn compose(&self, taylor: &[f64]) -> Jet<'a> {
        let k = self.sp.degree;
        assert!(taylor.len() > k.min(self.deg.max(0) as usize));
        let mut h = self.clone();
        h.c[0] = 0.0;
        let top = k.min(taylor.len() - 1);
        let mut r = self.sp.constant(taylor[top]);
        r.deg = self.deg;
        for t in (0..top).rev() {
            r = r.mul_jet(&h);
            r.c[0] += taylor[t];
        }
        r.deg = self.deg;
        r
    }

    pub fn exp(&self) -> Jet<'a> {
        let a0 = self.c[0].exp();
        let t: Vec<f64> = (0..=self.sp.degree).map(|k| a0 / factorial(k)).collect();
        self.compose(&t)
    }

    /// `self^p` for real p; requires a positive value unless p is an integer.
    pub fn powf(&self, p: f64) -> Jet<'a> {
        let a0 = self.c[0];
        let mut t = Vec::with_capacity(self.sp.degree + 1);
        let mut binom = 1.0;
        for k in 0..=self.sp.degree {
            t.push(binom * a0.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Jet<'a> {
        let a0 = self.c[0];
        let t: Vec<f64> = (0..=self.sp.degree)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s / a0.powi(k as i32 + 1)
            })
            .collect();
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Jet<'a> {
        self.powf(0.5)
    }

    pub fn ln(&self) -> Jet<'a> {
        let a0 = self.c[0];
        let mut t = vec![a0.ln()];
        for k in 1..=self.sp.degree {
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(s / (k as f64 * a0.powi(k as i32)));
        }
        self.compose(&t)
    }

    pub fn square(&self) -> Jet<'a> {
        self.mul_jet(self)
    }

    pub fn powi(&self, n: u32) -> Jet<'a> {
        let mut r = self.sp.constant(1.0);
        r.deg = self.deg;
        for _ in 0..n {
            r = r.mul_jet(self);
        }
        r
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&Jet<'a>> for &Jet<'a> {
            type Output = Jet<'a>;
            fn $m(self, o: &Jet<'a>) -> Jet<'a> {
                let f: fn(&Jet<'a>, &Jet<'a>) -> Jet<'a> = $body;
                f(self, o)
            }
        }
        impl<'a> $tr<Jet<'a>> for Jet<'a> {
            type Output = Jet<'a>;
            fn $m(self, o: Jet<'a>) -> Jet<'a> {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&Jet<'a>> for Jet<'a> {
            type Output = Jet<'a>;
            fn $m(self, o: &Jet<'a>) -> Jet<'a> {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Jet<'a>> for &Jet<'a> {
            type Output = Jet<'a>;
            fn $m(self, o: Jet<'a>) -> Jet<'a> {
                self.$m(&o)
            }
        }
    };
}

fn add_impl<'a>(a: &Jet<'a>, b: &Jet<'a>) -> Jet<'a> {
    let mut r = a.clone();
    for (x, y) in r.c.iter_mut().zip(b.c.iter()) {
        *x += y;
    }
    r.deg = a.deg.min(b.deg);
    r
}

fn sub_impl<'a>(a: &Jet<'a>, b: &Jet<'a>) -> Jet<'a> {
    let mut r = a.clone();
    for (x, y) in r.c.iter_mut().zip(b.c.iter()) {
        *x -= y;
    }
    r.deg = a.deg.min(b.deg);
    r
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, |a, b| a.mul_jet(b));

macro_rules! scalar_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<'a> $tr<f64> for &Jet<'a> {
            type Output = Jet<'a>;
            fn $m(self, f: f64) -> Jet<'a> {
                self.clone() $op f
            }
        }
        impl<'a> $tr<&Jet<'a>> for f64 {
            type Output = Jet<'a>;
            fn $m(self, j: &Jet<'a>) -> Jet<'a> {
                j.clone() $op self
            }
        }
        impl<'a> $tr<Jet<'a>> for f64 {
            type Output = Jet<'a>;
            fn $m(self, j: Jet<'a>) -> Jet<'a> {
                j $op self
            }
        }
    };
}

impl<'a> Mul<f64> for Jet<'a> {
    type Output = Jet<'a>;
    fn mul(mut self, f: f64) -> Jet<'a> {
        for x in self.c.iter_mut() {
            *x *= f;
        }
        self
    }
}

impl<'a> Add<f64> for Jet<'a> {
    type Output = Jet<'a>;
    fn add(mut self, f: f64) -> Jet<'a> {
        self.c[0] += f;
        self
    }
}

scalar_op!(Mul, mul, *);
scalar_op!(Add, add, +);

impl<'a> Sub<f64> for Jet<'a> {
    type Output = Jet<'a>;
    fn sub(mut self, f: f64) -> Jet<'a> {
        self.c[0] -= f;
        self
    }
}

impl<'a> Sub<f64> for &Jet<'a> {
    type Output = Jet<'a>;
    fn sub(self, f: f64) -> Jet<'a> {
        self.clone() - f
    }
}

impl<'a> Sub<&Jet<'a>> for f64 {
    type Output = Jet<'a>;
    fn sub(self, j: &Jet<'a>) -> Jet<'a> {
        -j + self
    }
}

impl<'a> Sub<Jet<'a>> for f64 {
    type Output = Jet<'a>;
    fn sub(self, j: Jet<'a>) -> Jet<'a> {
        -j + self
    }
}

impl<'a> Neg for &Jet<'a> {
    type Output = Jet<'a>;
    fn neg(self) -> Jet<'a> {
        self.scale(-1.0)
    }
}

impl<'a> Neg for Jet<'a> {
    type Output = Jet<'a>;
    fn neg(self) -> Jet<'a> {
        self * -1.0
    }
}

impl<'a> AddAssign<&Jet<'a>> for Jet<'a> {
    fn add_assign(&mut self, o: &Jet<'a>) {
        for (x, y) in self.c.iter_mut().zip(o.c.iter()) {
            *x += y;
        }
        self.deg = self.deg.min(o.deg);
    }
}

impl<'a> AddAssign<Jet<'a>> for Jet<'a> {
    fn add_assign(&mut self, o: Jet<'a>) {
        *self += &o;
    }
}

impl<'a> SubAssign<&Jet<'a>> for Jet<'a> {
    fn sub_assign(&mut self, o: &Jet<'a>) {
        for (x, y) in self.c.iter_mut().zip(o.c.iter()) {
            *x -= y;
        }
        self.deg = self.deg.min(o.deg);
    }
}

impl<'a> SubAssign<Jet<'a>> for Jet<'a> {
    fn sub_assign(&mut self, o: Jet<'a>) {
        *self -= &o;
    }
}

/// Taylor coefficients of `exp(p(t))` around a point, given the Taylor
/// coefficients of p there (univariate).
pub fn series_exp(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut g = vec![0.0; n];
    if n == 0 {
        return g;
    }
    g[0] = p[0].exp();
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * p[j] * g[k - j];
        }
        g[k] = acc / k as f64;
    }
    g
}

/// Taylor coefficients of `g(t)^p` from those of g (requires g(t) ≠ 0).
pub fn series_powf(g: &[f64], p: f64) -> Vec<f64> {
    let n = g.len();
    let mut h = vec![0.0; n];
    if n == 0 {
        return h;
    }
    h[0] = g[0].powf(p);
    for m in 1..n {
        let mut acc = 0.0;
        for k in 1..=m {
            acc += ((p + 1.0) * k as f64 - m as f64) * g[k] * h[m - k];
        }
        h[m] = acc / (m as f64 * g[0]);
    }
    h
}

/// Truncated product of two univariate series.
pub fn series_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut c = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// Taylor coefficients at `t` of the polynomial Σ coeffs[j] t^j.
pub fn poly_taylor(coeffs: &[f64], t: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in (k..coeffs.len()).rev() {
            acc = acc * t + coeffs[j] * binomial(j, k);
        }
        *slot = acc;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_hand_derivative() {
        let sp = JetSpace::new(2, 4);
        let s = sp.variable(0, 0.3);
        let x = sp.variable(1, -0.7);
        let f = (&s * &x).exp() * (&x * &x);
        // d/dx [e^{sx} x^2] = s x^2 e^{sx} + 2x e^{sx}
        let e = (0.3f64 * -0.7).exp();
        let expect = 0.3 * 0.49 * e + 2.0 * -0.7 * e;
        assert!((f.partial(&[0, 1]) - expect).abs() < 1e-14);
        assert!((f.d(1).value() - expect).abs() < 1e-14);
    }

    #[test]
    fn powf_and_recip_agree() {
        let sp = JetSpace::new(1, 6);
        let x = sp.variable(0, 1.7);
        let a = x.recip();
        let b = x.powf(-1.0);
        for k in 0..=6 {
            assert!((a.partial(&[k]) - b.partial(&[k])).abs() < 1e-12 * a.partial(&[k]).abs().max(1.0));
        }
        // d^3/dx^3 x^{-1} = -6 x^{-4}
        assert!((a.partial(&[3]) + 6.0 / 1.7f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn ln_inverts_exp() {
        let sp = JetSpace::new(2, 5);
        let s = sp.variable(0, 0.2);
        let x = sp.variable(1, 0.9);
        let f = &s * &x + x.square();
        let g = f.exp().ln();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn degree_tracking() {
        let sp = JetSpace::new(1, 3);
        let x = sp.variable(0, 0.5);
        let d3 = x.powi(3).dn(0, 3);
        assert_eq!(d3.valid_degree(), 0);
        assert!((d3.value() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn series_helpers() {
        // e^{t} around t=0 via exp of (0, 1)
        let g = series_exp(&[0.0, 1.0, 0.0, 0.0]);
        assert!((g[3] - 1.0 / 6.0).abs() < 1e-15);
        let p = poly_taylor(&[1.0, 0.0, 0.0, 1.0], 2.0, 4); // 1 + t^3 at 2
        assert_eq!(p, vec![9.0, 12.0, 6.0, 1.0]);
        // (1 + t)^{-1/2} at t = 0
        let h = series_powf(&[1.0, 1.0, 0.0, 0.0], -0.5);
        assert!((h[1] + 0.5).abs() < 1e-15 && (h[2] - 0.375).abs() < 1e-15);
        assert!((h[3] + 0.3125).abs() < 1e-15);
    }
}
