//! Forward-mode automatic differentiation.
//!
//! [`Dual<T, N>`] carries a value together with its gradient along `N`
//! independent directions. The inner type `T` is itself a [`Scalar`], so
//! nesting `Dual<Dual<f64, N>, N>` yields exact second derivatives, and
//! deeper nesting yields higher orders. All closed-form geometry in this
//! crate is written once, generic over `Scalar`, and differentiated by
//! instantiating it with dual numbers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like number type the geometry code is generic over.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Lift a constant (all derivatives zero).
    fn cst(v: f64) -> Self;
    /// The underlying real value, stripped of every derivative part.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn acos(self) -> Self;
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(self, x: Self) -> Self;
    /// Apply a real function given through its derivatives: `f(x, k)` is the
    /// `k`-th derivative at `x`.
    fn lift(self, f: &dyn Fn(f64, usize) -> f64) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn sq(self) -> Self {
        self * self
    }

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn lift(self, f: &dyn Fn(f64, usize) -> f64) -> Self {
        f(self, 0)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// A value with its derivatives along `N` directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T, const N: usize> {
    pub v: T,
    pub d: [T; N],
}

impl<T: Scalar, const N: usize> Dual<T, N> {
    pub fn constant(v: T) -> Self {
        Dual {
            v,
            d: [T::zero(); N],
        }
    }

    /// Independent variable `k` with value `v`.
    pub fn variable(v: T, k: usize) -> Self {
        let mut d = [T::zero(); N];
        d[k] = T::one();
        Dual { v, d }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Dual {
            v: f,
            d: self.d.map(|x| x * df),
        }
    }
}

/// Seed `N` coordinates as independent variables.
pub fn seed<T: Scalar, const N: usize>(x: [T; N]) -> [Dual<T, N>; N] {
    std::array::from_fn(|k| Dual::variable(x[k], k))
}

/// Seed coordinates for exact first and second derivatives.
pub fn seed2<const N: usize>(x: [f64; N]) -> [Dual<Dual<f64, N>, N>; N] {
    seed(seed(x))
}

/// Value, gradient and Hessian of a second-order dual result.
pub fn unpack2<const N: usize>(f: &Dual<Dual<f64, N>, N>) -> (f64, [f64; N], [[f64; N]; N]) {
    let grad = f.v.d;
    let hess = std::array::from_fn(|a| std::array::from_fn(|b| f.d[b].d[a]));
    (f.v.v, grad, hess)
}

impl<T: Scalar, const N: usize> Add for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual {
            v: self.v + o.v,
            d: std::array::from_fn(|i| self.d[i] + o.d[i]),
        }
    }
}

impl<T: Scalar, const N: usize> Sub for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual {
            v: self.v - o.v,
            d: std::array::from_fn(|i| self.d[i] - o.d[i]),
        }
    }
}

impl<T: Scalar, const N: usize> Mul for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual {
            v: self.v * o.v,
            d: std::array::from_fn(|i| self.d[i] * o.v + self.v * o.d[i]),
        }
    }
}

impl<T: Scalar, const N: usize> Div for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        Dual {
            v: q,
            d: std::array::from_fn(|i| (self.d[i] - q * o.d[i]) * inv),
        }
    }
}

impl<T: Scalar, const N: usize> Neg for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: self.d.map(|x| -x),
        }
    }
}

impl<T: Scalar, const N: usize> Add<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        Dual {
            v: self.v + o,
            d: self.d,
        }
    }
}

impl<T: Scalar, const N: usize> Sub<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        Dual {
            v: self.v - o,
            d: self.d,
        }
    }
}

impl<T: Scalar, const N: usize> Mul<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Dual {
            v: self.v * o,
            d: self.d.map(|x| x * o),
        }
    }
}

impl<T: Scalar, const N: usize> Div<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Scalar, const N: usize> Scalar for Dual<T, N> {
    fn cst(v: f64) -> Self {
        Dual::constant(T::cst(v))
    }

    fn value(&self) -> f64 {
        self.v.value()
    }

    fn lift(self, f: &dyn Fn(f64, usize) -> f64) -> Self {
        let df = self.v.lift(&|x, k| f(x, k + 1));
        self.chain(self.v.lift(f), df)
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (s * 2.0).recip())
    }

    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }

    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }

    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }

    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }

    fn acos(self) -> Self {
        let df = -(T::one() - self.v.sq()).sqrt().recip();
        self.chain(self.v.acos(), df)
    }

    fn atan2(self, x: Self) -> Self {
        let den = (self.v.sq() + x.v.sq()).recip();
        Dual {
            v: self.v.atan2(x.v),
            d: std::array::from_fn(|i| (x.v * self.d[i] - self.v * x.d[i]) * den),
        }
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let pm1 = self.v.powi(n - 1);
        self.chain(pm1 * self.v, pm1 * (n as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn test_fn<S: Scalar>(x: S) -> S {
        (x.sin() * x.exp() + x.cosh() / (x.sq() + 1.0)).sqrt() + x.powi(3).ln() - (x * 0.3).acos()
            + x.sinh() * x.cos()
            + (x * 2.0).atan2(x + 1.0)
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        for &x in &[0.3, 0.7, 1.1, 2.5] {
            let d = test_fn(Dual::<f64, 1>::variable(x, 0));
            assert!((d.v - test_fn(x)).abs() < 1e-14);
            let oracle = fd(test_fn::<f64>, x);
            assert!((d.d[0] - oracle).abs() < 1e-7 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn nested_gives_second_derivative() {
        for &x in &[0.4, 1.3, 2.0] {
            let f = test_fn(seed2([x])[0]);
            let (v, g, h) = unpack2(&f);
            assert!((v - test_fn(x)).abs() < 1e-14);
            let d1 = |y: f64| test_fn(Dual::<f64, 1>::variable(y, 0)).d[0];
            assert!((g[0] - d1(x)).abs() < 1e-13);
            let oracle = fd(d1, x);
            assert!((h[0][0] - oracle).abs() < 1e-6 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn mixed_partials_of_two_variable_function() {
        // f = x^2 y^3 + sin(x y)
        let f = |v: [Dual<Dual<f64, 2>, 2>; 2]| v[0].sq() * v[1].powi(3) + (v[0] * v[1]).sin();
        let (x, y) = (0.7, 1.3);
        let (_, g, h) = unpack2(&f(seed2([x, y])));
        assert!((g[0] - (2.0 * x * y.powi(3) + y * (x * y).cos())).abs() < 1e-13);
        assert!((g[1] - (3.0 * x * x * y * y + x * (x * y).cos())).abs() < 1e-13);
        let fxy = 6.0 * x * y * y + (x * y).cos() - x * y * (x * y).sin();
        assert!((h[0][1] - fxy).abs() < 1e-13);
        assert!((h[1][0] - fxy).abs() < 1e-13);
        assert!((h[1][1] - (6.0 * x * x * y - x * x * (x * y).sin())).abs() < 1e-13);
    }

    #[test]
    fn integer_powers_including_negative() {
        let x = Dual::<f64, 1>::variable(1.7, 0);
        let p = x.powi(-3);
        assert!((p.v - 1.7f64.powi(-3)).abs() < 1e-15);
        assert!((p.d[0] + 3.0 * 1.7f64.powi(-4)).abs() < 1e-14);
        assert_eq!(x.powi(0).d[0], 0.0);
    }

    #[test]
    fn lift_matches_builtin_to_second_order() {
        let x = seed2([0.7, -0.2]);
        let f = |a: Dual<Dual<f64, 2>, 2>, b: Dual<Dual<f64, 2>, 2>| a * b;
        let lifted = f(x[0], x[1]).lift(&|v, _| v.exp());
        let direct = f(x[0], x[1]).exp();
        let (a, b) = (unpack2(&lifted), unpack2(&direct));
        assert_eq!(a, b);
    }
}
