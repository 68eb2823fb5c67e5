//! Double-double scalars.
//!
//! A thin wrapper over [`TwoFloat`] arithmetic. Division is long division on
//! top of the exact double-double product, because `TwoFloat`'s own quotient
//! drops the residual of the reciprocal and is only accurate to `f64`.
//! Transcendental functions are the `f64` ones at the high word plus a
//! first-order correction from the low word: accurate to `f64` only, but
//! deterministic, which is what exact algebraic cancellations rely on.

use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

use crate::dual::Scalar;

/// About 106 bits of significand for `+ − × ÷ √`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd(pub TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }

    /// `f(hi) + f'(hi)·lo`.
    fn first_order(self, f: f64, df: f64) -> Dd {
        Dd(TwoFloat::from(f) + df * self.lo())
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd(TwoFloat::from(v))
    }
}

macro_rules! delegate {
    ($tr:ident, $f:ident) => {
        impl $tr for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: Dd) -> Dd {
                Dd($tr::$f(self.0, rhs.0))
            }
        }
        impl $tr<f64> for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: f64) -> Dd {
                Dd($tr::$f(self.0, rhs))
            }
        }
    };
}

delegate!(Add, add);
delegate!(Sub, sub);
delegate!(Mul, mul);

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, rhs: f64) -> Dd {
        self / Dd::from(rhs)
    }
}

impl Scalar for Dd {
    fn cst(v: f64) -> Self {
        Dd::from(v)
    }
    fn value(&self) -> f64 {
        self.hi() + self.lo()
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }
    fn sin(self) -> Self {
        self.first_order(f64::sin(self.hi()), f64::cos(self.hi()))
    }
    fn cos(self) -> Self {
        self.first_order(f64::cos(self.hi()), -f64::sin(self.hi()))
    }
    fn exp(self) -> Self {
        let e = f64::exp(self.hi());
        self.first_order(e, e)
    }
    fn ln(self) -> Self {
        self.first_order(f64::ln(self.hi()), 1.0 / self.hi())
    }
    fn sinh(self) -> Self {
        self.first_order(f64::sinh(self.hi()), f64::cosh(self.hi()))
    }
    fn cosh(self) -> Self {
        self.first_order(f64::cosh(self.hi()), f64::sinh(self.hi()))
    }
    fn acos(self) -> Self {
        let h = self.hi();
        self.first_order(f64::acos(h), -1.0 / (1.0 - h * h).sqrt())
    }
    fn atan2(self, x: Self) -> Self {
        let (yh, xh) = (self.hi(), x.hi());
        let corr = (xh * self.lo() - yh * x.lo()) / (xh * xh + yh * yh);
        Dd::from(f64::atan2(yh, xh)) + Dd::from(corr)
    }
    fn lift(self, f: &dyn Fn(f64, usize) -> f64) -> Self {
        self.first_order(f(self.hi(), 0), f(self.hi(), 1))
    }
}
