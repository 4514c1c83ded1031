//! Forward-mode jets over three chart variables.
//!
//! [`Jet1`] carries a value and its gradient; [`Jet2`] additionally carries the
//! Hessian. Both implement [`Scalar`], so the same generic code (expression
//! evaluation, frame construction, small linear algebra) runs on plain `f64`
//! for values and on jets when derivatives are needed.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by code that is generic over values and jets.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, e: f64) -> Self;
    /// True when every carried number is finite.
    fn all_finite(&self) -> bool;

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }

    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }

    /// `self^e` for a variable exponent, through `exp(e ln self)`.
    fn pow(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// Derivative triple `(f, f', f'')` of `x^n` at `v`, with the zero
/// coefficients kept exact so that `0 * inf` never appears at `v = 0`.
fn powi_coeffs(v: f64, n: i32) -> (f64, f64, f64) {
    let nf = n as f64;
    let f0 = v.powi(n);
    let f1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
    let f2 = if n == 0 || n == 1 {
        0.0
    } else {
        nf * (nf - 1.0) * v.powi(n - 2)
    };
    (f0, f1, f2)
}

fn powf_coeffs(v: f64, e: f64) -> (f64, f64, f64) {
    if e == 0.0 {
        return (1.0, 0.0, 0.0);
    }
    let f0 = v.powf(e);
    let f1 = e * v.powf(e - 1.0);
    let f2 = if e == 1.0 { 0.0 } else { e * (e - 1.0) * v.powf(e - 2.0) };
    (f0, f1, f2)
}

/// `k * d`, but exactly zero when `d` is zero, so that a singular chain
/// coefficient only pollutes the directions the argument depends on.
fn scale0(k: f64, d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        k * d
    }
}

fn abs_coeffs(v: f64) -> (f64, f64, f64) {
    let sign = if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    };
    (v.abs(), sign, 0.0)
}

/// Value and gradient with respect to the three chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub v: f64,
    pub g: [f64; 3],
}

impl Jet1 {
    pub fn constant(v: f64) -> Self {
        Self { v, g: [0.0; 3] }
    }

    /// The coordinate function `x^axis` evaluated at `v`.
    pub fn variable(v: f64, axis: usize) -> Self {
        let mut g = [0.0; 3];
        g[axis] = 1.0;
        Self { v, g }
    }

    fn chain(self, f0: f64, f1: f64) -> Self {
        Self {
            v: f0,
            g: self.g.map(|d| scale0(f1, d)),
        }
    }
}

impl Add for Jet1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1], self.g[2] + o.g[2]],
        }
    }
}

impl Sub for Jet1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            v: self.v - o.v,
            g: [self.g[0] - o.g[0], self.g[1] - o.g[1], self.g[2] - o.g[2]],
        }
    }
}

impl Mul for Jet1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = self.v * o.g[i] + o.v * self.g[i];
        }
        Self { v: self.v * o.v, g }
    }
}

impl Div for Jet1 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = (self.g[i] - q * o.g[i]) * inv;
        }
        Self { v: q, g }
    }
}

impl Neg for Jet1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            v: -self.v,
            g: self.g.map(|d| -d),
        }
    }
}

impl Scalar for Jet1 {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let v = self.v;
        self.chain(v.sin(), v.cos())
    }
    fn cos(self) -> Self {
        let v = self.v;
        self.chain(v.cos(), -v.sin())
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        self.chain(t, 1.0 + t * t)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        let v = self.v;
        self.chain(v.ln(), v.recip())
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r)
    }
    fn abs(self) -> Self {
        let (f0, f1, _) = abs_coeffs(self.v);
        self.chain(f0, f1)
    }
    fn powi(self, n: i32) -> Self {
        let (f0, f1, _) = powi_coeffs(self.v, n);
        self.chain(f0, f1)
    }
    fn powf(self, e: f64) -> Self {
        let (f0, f1, _) = powf_coeffs(self.v, e);
        self.chain(f0, f1)
    }
    fn all_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|d| d.is_finite())
    }
}

/// Value, gradient and Hessian with respect to the three chart coordinates.
///
/// The Hessian is symmetric by construction: every update adds a symmetric
/// term, so mixed partials agree bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            g: [0.0; 3],
            h: [[0.0; 3]; 3],
        }
    }

    pub fn variable(v: f64, axis: usize) -> Self {
        let mut g = [0.0; 3];
        g[axis] = 1.0;
        Self { v, g, h: [[0.0; 3]; 3] }
    }

    /// Seeds all three coordinates of `p`.
    pub fn seed(p: &[f64; 3]) -> [Jet2; 3] {
        [
            Self::variable(p[0], 0),
            Self::variable(p[1], 1),
            Self::variable(p[2], 2),
        ]
    }

    /// Drops the Hessian.
    pub fn first_order(&self) -> Jet1 {
        Jet1 { v: self.v, g: self.g }
    }

    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut h = [[0.0; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij = scale0(f1, self.h[i][j]) + scale0(f2, self.g[i] * self.g[j]);
            }
        }
        Self {
            v: f0,
            g: self.g.map(|d| scale0(f1, d)),
            h,
        }
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut h = self.h;
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij += o.h[i][j];
            }
        }
        Self {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1], self.g[2] + o.g[2]],
            h,
        }
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut g = [0.0; 3];
        let mut h = [[0.0; 3]; 3];
        for i in 0..3 {
            g[i] = self.v * o.g[i] + o.v * self.g[i];
            for j in 0..3 {
                h[i][j] = self.v * o.h[i][j] + o.v * self.h[i][j] + (self.g[i] * o.g[j] + o.g[i] * self.g[j]);
            }
        }
        Self { v: self.v * o.v, g, h }
    }
}

impl Div for Jet2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        self * o.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            v: -self.v,
            g: self.g.map(|d| -d),
            h: self.h.map(|r| r.map(|d| -d)),
        }
    }
}

impl Scalar for Jet2 {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let d = 1.0 + t * t;
        self.chain(t, d, 2.0 * t * d)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }
    fn abs(self) -> Self {
        let (f0, f1, f2) = abs_coeffs(self.v);
        self.chain(f0, f1, f2)
    }
    fn powi(self, n: i32) -> Self {
        let (f0, f1, f2) = powi_coeffs(self.v, n);
        self.chain(f0, f1, f2)
    }
    fn powf(self, e: f64) -> Self {
        let (f0, f1, f2) = powf_coeffs(self.v, e);
        self.chain(f0, f1, f2)
    }
    fn all_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|d| d.is_finite()) && self.h.iter().flatten().all(|d| d.is_finite())
    }
}
