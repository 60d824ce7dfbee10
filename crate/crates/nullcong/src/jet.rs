//! Truncated Taylor jets to third order in several variables.
//!
//! A `Jet<T>` stores the value and all partial derivatives of a scalar
//! quantity up to a tracked `order` (0..=3) at a point of a `dim`-dimensional
//! real chart. Arithmetic and elementary-function composition propagate
//! derivatives exactly (truncated-polynomial arithmetic), so every derivative
//! the rest of the crate consumes is exact up to rounding.
//!
//! Symmetry of the stored Hessian and third-derivative blocks holds
//! bit-exactly: entries are computed once per canonical multi-index
//! (i <= j <= k) and mirrored to all permutations.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Threshold below which a divisor/derivative pole counts as a domain hit.
const DOMAIN_EPS: f64 = 1e-12;

/// Scalar types jets can be built over (f64 and Complex64).
pub trait Num:
    Copy
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Modulus (absolute value); used for pivoting and domain checks.
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;
    fn powi(self, n: i32) -> Self;

    /// Extra domain restriction for real scalars (log/sqrt need positive input).
    fn real_domain_violation(self, f: Elementary) -> bool;
}

impl Num for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
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
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn real_domain_violation(self, f: Elementary) -> bool {
        match f {
            Elementary::Log => self <= 0.0,
            Elementary::Sqrt => self < 0.0,
            _ => false,
        }
    }
}

impl Num for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn tan(self) -> Self {
        Complex64::tan(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn atan(self) -> Self {
        Complex64::atan(self)
    }
    fn powi(self, n: i32) -> Self {
        Complex64::powi(&self, n)
    }
    fn real_domain_violation(self, _f: Elementary) -> bool {
        false
    }
}

/// Elementary functions with chain-rule support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Tan,
    Sec,
    Exp,
    Log,
    Atan,
    Sqrt,
    PowInt(i32),
    Recip,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Sec => "sec",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Atan => "atan",
            Elementary::Sqrt => "sqrt",
            Elementary::PowInt(_) => "powi",
            Elementary::Recip => "recip",
        }
    }

    /// f(v), f'(v), f''(v), f'''(v); caller has already vetted the domain.
    fn derivatives<T: Num>(self, v: T) -> [T; 4] {
        let one = T::one;
        let c = T::from_f64;
        match self {
            Elementary::Sin => [v.sin(), v.cos(), -v.sin(), -v.cos()],
            Elementary::Cos => [v.cos(), -v.sin(), -v.cos(), v.sin()],
            Elementary::Tan => {
                let t = v.tan();
                let s2 = one() + t * t; // sec^2
                [t, s2, c(2.0) * t * s2, s2 * (c(2.0) + c(6.0) * t * t)]
            }
            Elementary::Sec => {
                let t = v.tan();
                let s = one() / v.cos();
                [
                    s,
                    s * t,
                    s * (c(2.0) * t * t + one()),
                    s * t * (c(6.0) * t * t + c(5.0)),
                ]
            }
            Elementary::Exp => {
                let e = v.exp();
                [e, e, e, e]
            }
            Elementary::Log => {
                let r = one() / v;
                [v.ln(), r, -r * r, c(2.0) * r * r * r]
            }
            Elementary::Atan => {
                let r = one() / (one() + v * v);
                [
                    v.atan(),
                    r,
                    -c(2.0) * v * r * r,
                    (c(6.0) * v * v - c(2.0)) * r * r * r,
                ]
            }
            Elementary::Sqrt => {
                let s = v.sqrt();
                let r = one() / s;
                [
                    s,
                    c(0.5) * r,
                    c(-0.25) * r / v,
                    c(0.375) * r / (v * v),
                ]
            }
            Elementary::PowInt(n) => {
                // Falling factorial first: a zero coefficient kills the term
                // even when the remaining power would be singular at v = 0.
                let term = |k: i32| {
                    let mut coeff = 1.0;
                    for j in 0..k {
                        coeff *= f64::from(n - j);
                    }
                    if coeff == 0.0 {
                        T::zero()
                    } else {
                        c(coeff) * v.powi(n - k)
                    }
                };
                [term(0), term(1), term(2), term(3)]
            }
            Elementary::Recip => {
                let r = one() / v;
                let r2 = r * r;
                [r, -r2, c(2.0) * r2 * r, c(-6.0) * r2 * r2]
            }
        }
    }

    /// Domain check at the composition value.
    fn check_domain<T: Num>(self, v: T) -> Result<()> {
        let fail = |m: f64| Error::Domain { func: self.name(), modulus: m };
        if v.real_domain_violation(self) {
            return Err(fail(v.modulus()));
        }
        match self {
            Elementary::Tan | Elementary::Sec => {
                let m = v.cos().modulus();
                if m < DOMAIN_EPS {
                    return Err(fail(m));
                }
            }
            Elementary::Log | Elementary::Sqrt | Elementary::Recip => {
                if v.modulus() < DOMAIN_EPS {
                    return Err(fail(v.modulus()));
                }
            }
            Elementary::PowInt(n) if n < 0 => {
                if v.modulus() < DOMAIN_EPS {
                    return Err(fail(v.modulus()));
                }
            }
            Elementary::PowInt(n) => {
                // Differentiating v^n up to third order needs v != 0 when n < 3,
                // except for the exact polynomial cases n >= 0.
                let _ = n;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Taylor jet of a scalar quantity: value plus partials up to `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    dim: usize,
    order: u8,
    /// Layout: [value, grad (dim), hess (dim^2), third (dim^3)], truncated at `order`.
    data: Box<[T]>,
}

pub type RJet = Jet<f64>;
pub type CJet = Jet<Complex64>;

fn buf_len(dim: usize, order: u8) -> usize {
    let mut len = 1;
    let mut block = 1;
    for _ in 0..order {
        block *= dim;
        len += block;
    }
    len
}

impl<T: Num> Jet<T> {
    pub fn constant(dim: usize, order: u8, value: T) -> Self {
        assert!(order <= 3);
        let mut data = vec![T::zero(); buf_len(dim, order)].into_boxed_slice();
        data[0] = value;
        Jet { dim, order, data }
    }

    /// Jet of the `axis`-th coordinate function at `point` (exact to all orders).
    pub fn coordinate(point: &[f64], axis: usize, order: u8) -> Result<Self> {
        if axis >= point.len() {
            return Err(Error::Argument(format!(
                "coordinate axis {axis} out of range for a {}-dimensional chart",
                point.len()
            )));
        }
        let mut j = Self::constant(point.len(), order, T::from_f64(point[axis]));
        if order >= 1 {
            j.data[1 + axis] = T::one();
        }
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> T {
        self.data[0]
    }

    pub fn grad(&self, i: usize) -> T {
        assert!(self.order >= 1 && i < self.dim, "gradient access out of range");
        self.data[1 + i]
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        assert!(self.order >= 2 && i < self.dim && j < self.dim);
        self.data[1 + self.dim + i * self.dim + j]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> T {
        let d = self.dim;
        assert!(self.order >= 3 && i < d && j < d && k < d);
        self.data[1 + d + d * d + (i * d + j) * d + k]
    }

    fn grad_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[1 + i]
    }

    fn set_hess_sym(&mut self, i: usize, j: usize, v: T) {
        let d = self.dim;
        let base = 1 + d;
        self.data[base + i * d + j] = v;
        self.data[base + j * d + i] = v;
    }

    fn set_third_sym(&mut self, i: usize, j: usize, k: usize, v: T) {
        let d = self.dim;
        let base = 1 + d + d * d;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.data[base + (a * d + b) * d + c] = v;
        }
    }

    /// Truncate the tracked order (no-op if already lower).
    pub fn truncated(&self, order: u8) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Self::constant(self.dim, order, T::zero());
        out.data.copy_from_slice(&self.data[..buf_len(self.dim, order)]);
        out
    }

    /// The jet of the partial derivative along `axis`; drops one order.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        assert!(axis < self.dim);
        let d = self.dim;
        let ord = self.order - 1;
        let mut out = Self::constant(d, ord, self.grad(axis));
        if ord >= 1 {
            for i in 0..d {
                *out.grad_mut(i) = self.hess(axis, i);
            }
        }
        if ord >= 2 {
            for i in 0..d {
                for j in i..d {
                    out.set_hess_sym(i, j, self.third(axis, i, j));
                }
            }
        }
        out
    }

    /// Re-embed into a larger chart: old axis `i` becomes `axis_map[i]`.
    /// Derivatives along new axes not in the image are zero.
    pub fn embedded(&self, new_dim: usize, axis_map: &[usize]) -> Self {
        assert_eq!(axis_map.len(), self.dim);
        assert!(axis_map.iter().all(|&a| a < new_dim));
        let mut out = Self::constant(new_dim, self.order, self.value());
        if self.order >= 1 {
            for i in 0..self.dim {
                *out.grad_mut(axis_map[i]) = self.grad(i);
            }
        }
        if self.order >= 2 {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let v = self.hess(i, j);
                    let (a, b) = (axis_map[i], axis_map[j]);
                    out.data[1 + new_dim + a * new_dim + b] = v;
                }
            }
        }
        if self.order >= 3 {
            let nd = new_dim;
            let base = 1 + nd + nd * nd;
            for i in 0..self.dim {
                for j in 0..self.dim {
                    for k in 0..self.dim {
                        let v = self.third(i, j, k);
                        out.data[base + (axis_map[i] * nd + axis_map[j]) * nd + axis_map[k]] = v;
                    }
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = *v * c;
        }
        out
    }

    fn binary_order(&self, rhs: &Self) -> (usize, u8) {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        (self.dim, self.order.min(rhs.order))
    }

    pub fn add_jet(&self, rhs: &Self) -> Self {
        let (d, ord) = self.binary_order(rhs);
        let mut out = Self::constant(d, ord, T::zero());
        for (i, v) in out.data.iter_mut().enumerate() {
            *v = self.data[i] + rhs.data[i];
        }
        out
    }

    pub fn sub_jet(&self, rhs: &Self) -> Self {
        let (d, ord) = self.binary_order(rhs);
        let mut out = Self::constant(d, ord, T::zero());
        for (i, v) in out.data.iter_mut().enumerate() {
            *v = self.data[i] - rhs.data[i];
        }
        out
    }

    /// Leibniz product; symmetric blocks filled canonically (i <= j <= k).
    pub fn mul_jet(&self, rhs: &Self) -> Self {
        let (d, ord) = self.binary_order(rhs);
        let a = self;
        let b = rhs;
        let mut out = Self::constant(d, ord, a.value() * b.value());
        if ord >= 1 {
            for i in 0..d {
                *out.grad_mut(i) = a.grad(i) * b.value() + a.value() * b.grad(i);
            }
        }
        if ord >= 2 {
            for i in 0..d {
                for j in i..d {
                    let v = a.hess(i, j) * b.value()
                        + a.grad(i) * b.grad(j)
                        + a.grad(j) * b.grad(i)
                        + a.value() * b.hess(i, j);
                    out.set_hess_sym(i, j, v);
                }
            }
        }
        if ord >= 3 {
            for i in 0..d {
                for j in i..d {
                    for k in j..d {
                        let v = a.third(i, j, k) * b.value()
                            + (a.hess(i, j) * b.grad(k)
                                + a.hess(i, k) * b.grad(j)
                                + a.hess(j, k) * b.grad(i))
                            + (a.grad(i) * b.hess(j, k)
                                + a.grad(j) * b.hess(i, k)
                                + a.grad(k) * b.hess(i, j))
                            + a.value() * b.third(i, j, k);
                        out.set_third_sym(i, j, k, v);
                    }
                }
            }
        }
        out
    }

    /// Compose with an elementary function (Faa di Bruno to order 3).
    pub fn apply(&self, f: Elementary) -> Result<Self> {
        let v = self.value();
        f.check_domain(v)?;
        let g = f.derivatives(v);
        let d = self.dim;
        let mut out = Self::constant(d, self.order, g[0]);
        if self.order >= 1 {
            for i in 0..d {
                *out.grad_mut(i) = g[1] * self.grad(i);
            }
        }
        if self.order >= 2 {
            for i in 0..d {
                for j in i..d {
                    let v = g[1] * self.hess(i, j) + g[2] * self.grad(i) * self.grad(j);
                    out.set_hess_sym(i, j, v);
                }
            }
        }
        if self.order >= 3 {
            for i in 0..d {
                for j in i..d {
                    for k in j..d {
                        let v = g[1] * self.third(i, j, k)
                            + g[2]
                                * (self.grad(i) * self.hess(j, k)
                                    + self.grad(j) * self.hess(i, k)
                                    + self.grad(k) * self.hess(i, j))
                            + g[3] * self.grad(i) * self.grad(j) * self.grad(k);
                        out.set_third_sym(i, j, k, v);
                    }
                }
            }
        }
        if !out.data.iter().all(|x| x.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite result applying {}",
                f.name()
            )));
        }
        Ok(out)
    }

    pub fn sin(&self) -> Self {
        self.apply(Elementary::Sin).expect("sin is total")
    }
    pub fn cos(&self) -> Self {
        self.apply(Elementary::Cos).expect("cos is total")
    }
    pub fn exp(&self) -> Self {
        self.apply(Elementary::Exp).expect("exp is total")
    }
    pub fn try_tan(&self) -> Result<Self> {
        self.apply(Elementary::Tan)
    }
    pub fn try_sec(&self) -> Result<Self> {
        self.apply(Elementary::Sec)
    }
    pub fn try_ln(&self) -> Result<Self> {
        self.apply(Elementary::Log)
    }
    pub fn try_sqrt(&self) -> Result<Self> {
        self.apply(Elementary::Sqrt)
    }
    pub fn try_atan(&self) -> Result<Self> {
        self.apply(Elementary::Atan)
    }
    pub fn try_powi(&self, n: i32) -> Result<Self> {
        self.apply(Elementary::PowInt(n))
    }
    pub fn try_recip(&self) -> Result<Self> {
        self.apply(Elementary::Recip)
    }
    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul_jet(&rhs.try_recip()?))
    }

    /// Largest modulus among all stored coefficients.
    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

impl RJet {
    pub fn promote(&self) -> CJet {
        let data: Vec<Complex64> = self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Jet { dim: self.dim, order: self.order, data: data.into_boxed_slice() }
    }
}

impl CJet {
    pub fn conj(&self) -> CJet {
        let data: Vec<Complex64> = self.data.iter().map(|v| v.conj()).collect();
        Jet { dim: self.dim, order: self.order, data: data.into_boxed_slice() }
    }

    pub fn real_part(&self) -> RJet {
        let data: Vec<f64> = self.data.iter().map(|v| v.re).collect();
        Jet { dim: self.dim, order: self.order, data: data.into_boxed_slice() }
    }

    pub fn imag_part(&self) -> RJet {
        let data: Vec<f64> = self.data.iter().map(|v| v.im).collect();
        Jet { dim: self.dim, order: self.order, data: data.into_boxed_slice() }
    }

    /// Largest modulus among imaginary parts (reality-check diagnostic).
    pub fn imag_max(&self) -> f64 {
        self.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl<'a, T: Num> $trait<&'a Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &'a Jet<T>) -> Jet<T> {
                self.$imp(rhs)
            }
        }
        impl<T: Num> $trait<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$imp(&rhs)
            }
        }
        impl<'a, T: Num> $trait<&'a Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &'a Jet<T>) -> Jet<T> {
                (&self).$imp(rhs)
            }
        }
        impl<'a, T: Num> $trait<Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                self.$imp(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, add_jet);
jet_binop!(Sub, sub, sub_jet);
jet_binop!(Mul, mul, mul_jet);

impl<T: Num> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scaled(-T::one())
    }
}

impl<T: Num> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scaled(-T::one())
    }
}

/// Division panics on a (near-)zero divisor; evaluation paths that can hit
/// poles use `try_div`/`try_recip` instead.
impl<T: Num> Div<&Jet<T>> for &Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: &Jet<T>) -> Jet<T> {
        self.try_div(rhs).expect("jet division by zero")
    }
}

impl<T: Num> Div<Jet<T>> for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: Jet<T>) -> Jet<T> {
        (&self).try_div(&rhs).expect("jet division by zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // ---------- finite-difference oracle (pure function evaluations) ----------

    /// Independent derivative oracle: central differences at step 1e-4 for
    /// orders 1-2, Richardson-extrapolated central stencils at base step 2e-3
    /// for order 3 (the smallest rounding-noise regime for third derivatives
    /// in f64).
    struct FdOracle {
        h12: f64,
        h3: f64,
    }

    impl Default for FdOracle {
        fn default() -> Self {
            FdOracle { h12: 1e-4, h3: 2e-3 }
        }
    }

    impl FdOracle {
        fn grad(&self, f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize) -> f64 {
            let h = self.h12;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        }

        fn hess(&self, f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, j: usize) -> f64 {
            let h = self.h12;
            let shift = |si: f64, sj: f64| {
                let mut y = x.to_vec();
                y[i] += si * h;
                y[j] += sj * h;
                f(&y)
            };
            if i == j {
                (shift(1.0, 0.0) - 2.0 * f(x) + shift(-1.0, 0.0)) / (h * h)
            } else {
                (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0))
                    / (4.0 * h * h)
            }
        }

        /// d^3 f / dx_i dx_j dx_k via nested central stencils at step h,
        /// Richardson-extrapolated: D = (4 D(h) - D(2h)) / 3.
        fn third(
            &self,
            f: &dyn Fn(&[f64]) -> f64,
            x: &[f64],
            i: usize,
            j: usize,
            k: usize,
        ) -> f64 {
            let d = |h: f64| Self::third_at(f, x, i, j, k, h);
            (4.0 * d(self.h3) - d(2.0 * self.h3)) / 3.0
        }

        fn third_at(
            f: &dyn Fn(&[f64]) -> f64,
            x: &[f64],
            i: usize,
            j: usize,
            k: usize,
            h: f64,
        ) -> f64 {
            // Nested first-derivative central stencils in each slot.
            let g2 = |y: &[f64]| {
                let mut yp = y.to_vec();
                let mut ym = y.to_vec();
                yp[k] += h;
                ym[k] -= h;
                (f(&yp) - f(&ym)) / (2.0 * h)
            };
            let g1 = |y: &[f64]| {
                let mut yp = y.to_vec();
                let mut ym = y.to_vec();
                yp[j] += h;
                ym[j] -= h;
                (g2(&yp) - g2(&ym)) / (2.0 * h)
            };
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (g1(&xp) - g1(&xm)) / (2.0 * h)
        }
    }

    /// exp(sin(x) * y) evaluated two ways: plain f64 and as a jet expression.
    fn composite_plain(x: &[f64]) -> f64 {
        (x[0].sin() * x[1]).exp()
    }

    fn composite_jet(x: &[f64]) -> RJet {
        let xj = RJet::coordinate(x, 0, 3).unwrap();
        let yj = RJet::coordinate(x, 1, 3).unwrap();
        (xj.sin() * yj).exp()
    }

    /// A harder composite exercising tan/atan/sqrt/log/powi/recip.
    fn gnarly_plain(x: &[f64]) -> f64 {
        let u = (x[0] * 0.3).tan() + x[1];
        let w = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
        (u.atan() + w.ln()) * (1.0 / (2.0 + x[1])).powi(2) + x[0].powi(3) * 0.1
    }

    fn gnarly_jet(x: &[f64]) -> RJet {
        let xj = RJet::coordinate(x, 0, 3).unwrap();
        let yj = RJet::coordinate(x, 1, 3).unwrap();
        let u = xj.scaled(0.3).try_tan().unwrap() + &yj;
        let one = RJet::constant(2, 3, 1.0);
        let w = (&one + &(&xj * &xj) + &(&yj * &yj)).try_sqrt().unwrap();
        let two = RJet::constant(2, 3, 2.0);
        (u.try_atan().unwrap() + w.try_ln().unwrap()) * (two + &yj).try_recip().unwrap().try_powi(2).unwrap()
            + xj.try_powi(3).unwrap().scaled(0.1)
    }

    fn check_against_fd(
        plain: &dyn Fn(&[f64]) -> f64,
        jet: &dyn Fn(&[f64]) -> RJet,
        x: &[f64],
        tol12: f64,
        tol3: f64,
    ) {
        let oracle = FdOracle::default();
        let j = jet(x);
        let d = x.len();
        assert_relative_eq!(j.value(), plain(x), max_relative = 1e-12);
        let scale12 = j.max_modulus().max(1.0);
        for i in 0..d {
            assert!(
                (j.grad(i) - oracle.grad(plain, x, i)).abs() / scale12 < tol12,
                "grad[{i}] mismatch at {x:?}"
            );
            for jj in i..d {
                assert!(
                    (j.hess(i, jj) - oracle.hess(plain, x, i, jj)).abs() / scale12 < tol12,
                    "hess[{i}{jj}] mismatch at {x:?}"
                );
                for k in jj..d {
                    assert!(
                        (j.third(i, jj, k) - oracle.third(plain, x, i, jj, k)).abs() / scale12
                            < tol3,
                        "third[{i}{jj}{k}] mismatch at {x:?}: jet {} vs fd {}",
                        j.third(i, jj, k),
                        oracle.third(plain, x, i, jj, k)
                    );
                }
            }
        }
    }

    #[test]
    fn composite_matches_finite_differences_to_order_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            // Orders 1-2 at step 1e-4 reach 1e-7; order 3 (Richardson) 1e-6.
            check_against_fd(&composite_plain, &composite_jet, &x, 1e-7, 1e-6);
        }
    }

    #[test]
    fn elementary_chain_rules_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let x = [rng.gen_range(-1.2..1.2), rng.gen_range(-0.9..0.9)];
            check_against_fd(&gnarly_plain, &gnarly_jet, &x, 1e-7, 1e-6);
        }
    }

    // ---------- exact identities ----------

    #[test]
    fn coordinate_polynomial_jets_are_exact() {
        // p(x, y) = x^3 y + 2 x y - 5: all derivatives closed-form.
        let x = [1.3, -0.7];
        let xj = RJet::coordinate(&x, 0, 3).unwrap();
        let yj = RJet::coordinate(&x, 1, 3).unwrap();
        let p = xj.try_powi(3).unwrap() * &yj + (xj.scaled(2.0) * &yj)
            + RJet::constant(2, 3, -5.0);
        let (xv, yv) = (x[0], x[1]);
        assert_relative_eq!(p.value(), xv.powi(3) * yv + 2.0 * xv * yv - 5.0, epsilon = 1e-14);
        assert_relative_eq!(p.grad(0), 3.0 * xv * xv * yv + 2.0 * yv, epsilon = 1e-14);
        assert_relative_eq!(p.grad(1), xv.powi(3) + 2.0 * xv, epsilon = 1e-14);
        assert_relative_eq!(p.hess(0, 0), 6.0 * xv * yv, epsilon = 1e-14);
        assert_relative_eq!(p.hess(0, 1), 3.0 * xv * xv + 2.0, epsilon = 1e-14);
        assert_relative_eq!(p.third(0, 0, 0), 6.0 * yv, epsilon = 1e-14);
        assert_relative_eq!(p.third(0, 0, 1), 6.0 * xv, epsilon = 1e-14);
        assert_relative_eq!(p.third(1, 1, 1), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hessian_and_third_are_bit_exactly_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let js: Vec<RJet> = (0..4).map(|i| RJet::coordinate(&x, i, 3).unwrap()).collect();
            let f = ((&js[0] * &js[1]).sin() + js[2].exp() * &js[3])
                .try_atan()
                .unwrap()
                * (&js[1] + &js[2]).cos();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(f.hess(i, j).to_bits() == f.hess(j, i).to_bits());
                    for k in 0..4 {
                        let t = f.third(i, j, k).to_bits();
                        assert!(t == f.third(i, k, j).to_bits());
                        assert!(t == f.third(j, i, k).to_bits());
                        assert!(t == f.third(k, j, i).to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn complex_conjugation_commutes_with_real_coefficient_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let base = CJet::coordinate(&x, 0, 3).unwrap()
                + CJet::coordinate(&x, 1, 3).unwrap()
                    .scaled(Complex64::new(0.3, 0.8));
            // Keep values away from branch cuts of log/sqrt.
            let shifted = &base + &CJet::constant(2, 3, Complex64::new(3.0, 0.0));
            for f in [
                Elementary::Sin,
                Elementary::Cos,
                Elementary::Tan,
                Elementary::Sec,
                Elementary::Exp,
                Elementary::Log,
                Elementary::Atan,
                Elementary::Sqrt,
                Elementary::PowInt(3),
                Elementary::PowInt(-2),
                Elementary::Recip,
            ] {
                let lhs = shifted.conj().apply(f).unwrap();
                let rhs = shifted.apply(f).unwrap().conj();
                let diff: f64 = (0..lhs.data.len())
                    .map(|i| (lhs.data[i] - rhs.data[i]).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-12, "conj does not commute with {:?}", f);
            }
        }
    }

    #[test]
    fn derivative_shift_matches_direct_jet() {
        let x = [0.4, -0.2];
        let f = composite_jet(&x);
        let dx = f.derivative(0);
        assert_eq!(dx.order(), 2);
        assert_relative_eq!(dx.value(), f.grad(0), epsilon = 1e-15);
        assert_relative_eq!(dx.grad(1), f.hess(0, 1), epsilon = 1e-15);
        assert_relative_eq!(dx.hess(1, 1), f.third(0, 1, 1), epsilon = 1e-15);
    }

    #[test]
    fn embedding_scatters_axes() {
        let x = [0.3, 0.9];
        let f = composite_jet(&x);
        let g = f.embedded(4, &[1, 3]);
        assert_eq!(g.dim(), 4);
        assert_relative_eq!(g.grad(1), f.grad(0), epsilon = 1e-15);
        assert_relative_eq!(g.grad(3), f.grad(1), epsilon = 1e-15);
        assert_eq!(g.grad(0), 0.0);
        assert_relative_eq!(g.hess(1, 3), f.hess(0, 1), epsilon = 1e-15);
        assert_relative_eq!(g.third(3, 3, 1), f.third(1, 1, 0), epsilon = 1e-15);
    }

    #[test]
    fn domain_violations_are_reported() {
        let at = |v: f64| RJet::constant(1, 3, v);
        assert!(at(std::f64::consts::FRAC_PI_2).try_sec().is_err());
        assert!(at(std::f64::consts::FRAC_PI_2).try_tan().is_err());
        assert!(at(-1.0).try_ln().is_err());
        assert!(at(-1.0).try_sqrt().is_err());
        assert!(at(0.0).try_recip().is_err());
        assert!(at(0.0).try_powi(-1).is_err());
        assert!(at(0.0).try_powi(2).is_ok());
        assert!(RJet::coordinate(&[1.0], 3, 3).is_err());
    }

    #[test]
    fn order_tracking_caps_results() {
        let x = [0.5];
        let a = RJet::coordinate(&x, 0, 3).unwrap();
        let b = a.derivative(0);
        assert_eq!((&a + &b.embedded(1, &[0])).order(), 2);
        assert_eq!(a.truncated(1).order(), 1);
    }

    // ---------- randomized algebraic invariants ----------

    /// Bivariate monomial exponents of total degree at most `deg`, in a fixed
    /// order compatible with `bipoly_eval` and `bipoly_mul`.
    fn bipoly_exponents(deg: usize) -> Vec<(usize, usize)> {
        let mut exps = Vec::new();
        for s in 0..=deg {
            for i in 0..=s {
                exps.push((i, s - i));
            }
        }
        exps
    }

    fn bipoly_eval(coeffs: &[f64], deg: usize, x: &[f64]) -> RJet {
        let xj = RJet::coordinate(x, 0, 3).unwrap();
        let yj = RJet::coordinate(x, 1, 3).unwrap();
        let mut acc = RJet::constant(2, 3, 0.0);
        for (&c, &(i, j)) in coeffs.iter().zip(&bipoly_exponents(deg)) {
            let mut term = RJet::constant(2, 3, c);
            for _ in 0..i {
                term = &term * &xj;
            }
            for _ in 0..j {
                term = &term * &yj;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Exact coefficient-level product of two degree-`deg` polynomials.
    fn bipoly_mul(a: &[f64], b: &[f64], deg: usize) -> Vec<f64> {
        let exps = bipoly_exponents(deg);
        let out_exps = bipoly_exponents(2 * deg);
        let mut out = vec![0.0; out_exps.len()];
        for (&ca, &(ia, ja)) in a.iter().zip(&exps) {
            for (&cb, &(ib, jb)) in b.iter().zip(&exps) {
                let pos = out_exps
                    .iter()
                    .position(|&e| e == (ia + ib, ja + jb))
                    .unwrap();
                out[pos] += ca * cb;
            }
        }
        out
    }

    fn assert_jets_close(a: &RJet, b: &RJet, tol: f64) {
        let scale = a.max_modulus().max(b.max_modulus()).max(1.0);
        let close = |u: f64, v: f64| (u - v).abs() / scale < tol;
        assert!(close(a.value(), b.value()), "value {} vs {}", a.value(), b.value());
        for i in 0..2 {
            assert!(close(a.grad(i), b.grad(i)), "grad[{i}]");
            for j in 0..2 {
                assert!(close(a.hess(i, j), b.hess(i, j)), "hess[{i}{j}]");
                for k in 0..2 {
                    assert!(close(a.third(i, j, k), b.third(i, j, k)), "third[{i}{j}{k}]");
                }
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        /// Truncated jet multiplication agrees with exact coefficient-level
        /// polynomial multiplication through every stored derivative.
        #[test]
        fn products_match_coefficient_convolution(
            a in proptest::collection::vec(-1.0f64..1.0, 10),
            b in proptest::collection::vec(-1.0f64..1.0, 10),
            x in -0.9f64..0.9,
            y in -0.9f64..0.9,
        ) {
            let pt = [x, y];
            let via_jets = &bipoly_eval(&a, 3, &pt) * &bipoly_eval(&b, 3, &pt);
            let via_coeffs = bipoly_eval(&bipoly_mul(&a, &b, 3), 6, &pt);
            assert_jets_close(&via_jets, &via_coeffs, 1e-12);
        }

        /// Chain rule through transcendental inverses: exp(log w) = w for
        /// w >= 1, sqrt(w)^2 = w, and atan(tan u) = u inside the pole-free
        /// band, all through third order.
        #[test]
        fn transcendental_round_trips_hold(
            c in proptest::collection::vec(-0.8f64..0.8, 10),
            x in -0.9f64..0.9,
            y in -0.9f64..0.9,
        ) {
            let p = bipoly_eval(&c, 3, &[x, y]);
            let w = &RJet::constant(2, 3, 1.0) + &(&p * &p);
            assert_jets_close(&w.try_ln().unwrap().exp(), &w, 1e-11);
            let r = w.try_sqrt().unwrap();
            assert_jets_close(&(&r * &r), &w, 1e-11);
            let u = p.scaled(0.15); // |p| <= 8, so |u| <= 1.2 < pi/2
            assert_jets_close(&u.try_tan().unwrap().try_atan().unwrap(), &u, 1e-10);
        }
    }
}
