//! Coefficient functions of the Bondi asymptotic expansion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::time::TimeProfile;
use crate::dual::{seed, Dual, Scalar};
use crate::error::{Error, Result};

/// One term `T(u) · sin^a θ · cos^b θ · trig(mψ)` where `trig` is
/// `cos(mψ)` for `m ≥ 0` and `sin(|m|ψ)` for `m < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub time: TimeProfile,
    pub sin_pow: u32,
    pub cos_pow: u32,
    pub m: i32,
}

impl Mode {
    fn eval<S: Scalar>(&self, u: S, sin_t: S, cos_t: S, psi: S) -> S {
        let mut v =
            self.time.eval(u) * sin_t.powi(self.sin_pow as i32) * cos_t.powi(self.cos_pow as i32);
        if self.m > 0 {
            v = v * (psi * self.m as f64).cos();
        } else if self.m < 0 {
            v = v * (psi * (-self.m) as f64).sin();
        }
        v
    }
}

/// A scalar on `(u, θ, ψ)` as a finite sum of [`Mode`]s.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AngularField {
    pub modes: Vec<Mode>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

impl AngularField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(v: f64) -> Self {
        Self::monomial(vec![v], 0, 0, 0)
    }

    pub fn monomial(time: impl Into<TimeProfile>, sin_pow: u32, cos_pow: u32, m: i32) -> Self {
        AngularField {
            modes: vec![Mode {
                time: time.into(),
                sin_pow,
                cos_pow,
                m,
            }],
        }
    }

    /// Real spherical harmonic `Y_lm` (no Condon–Shortley phase) times `T(u)`.
    pub fn harmonic(l: u32, m: i32, time: impl Into<TimeProfile>) -> Result<Self> {
        let time = time.into();
        let am = m.unsigned_abs();
        if am > l {
            return Err(Error::Config(format!(
                "harmonic order |m| = {am} exceeds degree l = {l}"
            )));
        }
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt()
            * if m == 0 { 1.0 } else { 2f64.sqrt() };
        // P_l(x) = 2^-l Σ_k (-1)^k C(l,k) C(2l-2k, l) x^(l-2k)
        let mut poly = vec![0.0; l as usize + 1];
        for k in 0..=l / 2 {
            let c = (-1f64).powi(k as i32) * binomial(l, k) * binomial(2 * l - 2 * k, l)
                / 2f64.powi(l as i32);
            poly[(l - 2 * k) as usize] += c;
        }
        for _ in 0..am {
            poly = poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(p, c)| c * p as f64)
                .collect();
        }
        let modes = poly
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(p, c)| Mode {
                time: time.clone().scaled(c * norm),
                sin_pow: am,
                cos_pow: p as u32,
                m,
            })
            .collect();
        Ok(AngularField { modes })
    }

    pub fn plus(mut self, other: AngularField) -> Self {
        self.modes.extend(other.modes);
        self
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.modes = self
            .modes
            .into_iter()
            .map(|m| Mode {
                time: m.time.scaled(k),
                ..m
            })
            .collect();
        self
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.time.is_zero())
    }

    /// Retarded-time interval covered by every tabulated mode (`None` = unrestricted).
    pub fn time_range(&self) -> Option<(f64, f64)> {
        self.modes
            .iter()
            .filter_map(|m| m.time.range())
            .reduce(|a, b| (a.0.max(b.0), a.1.min(b.1)))
    }

    pub fn eval<S: Scalar>(&self, u: S, theta: S, psi: S) -> S {
        let (s, c) = (theta.sin(), theta.cos());
        self.modes
            .iter()
            .fold(S::zero(), |acc, m| acc + m.eval(u, s, c, psi))
    }

    /// Value and first derivatives `[f, f_,u, f_,θ, f_,ψ]`.
    pub fn jet1<S: Scalar>(&self, u: S, theta: S, psi: S) -> [S; 4] {
        let [du, dt, dp] = seed([u, theta, psi]);
        let f = self.eval(du, dt, dp);
        [f.v, f.d[0], f.d[1], f.d[2]]
    }

    /// Value, gradient and Hessian in `(u, θ, ψ)`.
    pub fn jet2<S: Scalar>(&self, u: S, theta: S, psi: S) -> Jet2<S> {
        let x: [Dual<Dual<S, 3>, 3>; 3] = seed(seed([u, theta, psi]));
        let f = self.eval(x[0], x[1], x[2]);
        Jet2 {
            v: f.v.v,
            d: f.v.d,
            dd: std::array::from_fn(|a| std::array::from_fn(|b| f.d[b].d[a])),
        }
    }

    /// Largest `|f|` over a sample lattice at fixed `u`.
    pub fn sup_at(&self, u: f64, n: usize) -> f64 {
        let mut sup = 0.0f64;
        for i in 0..n {
            let th = PI * (i as f64 + 0.5) / n as f64;
            for j in 0..2 * n {
                let ps = PI * j as f64 / n as f64;
                sup = sup.max(self.eval(u, th, ps).abs());
            }
        }
        sup
    }
}

/// Second-order jet in `(u, θ, ψ)` (index 0 = u, 1 = θ, 2 = ψ).
#[derive(Debug, Clone, Copy)]
pub struct Jet2<S> {
    pub v: S,
    pub d: [S; 3],
    pub dd: [[S; 3]; 3],
}

/// News potentials, mass and angular-momentum aspects, and third-order
/// coefficients of a Bondi radiating metric.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BondiExpansion {
    pub c: AngularField,
    pub d: AngularField,
    /// Third-order coefficient `C` of `γ`.
    pub big_c: AngularField,
    /// Third-order coefficient `H` of `δ`.
    pub big_h: AngularField,
    /// Mass aspect `M`.
    pub mass: AngularField,
    /// Angular-momentum aspects `N`, `P`.
    pub n: AngularField,
    pub p: AngularField,
}

/// The derived fields `l, l̄, p, p̄` at one point.
#[derive(Debug, Clone, Copy)]
pub struct Derived<S> {
    pub l: S,
    pub l_bar: S,
    pub p: S,
    pub p_bar: S,
}

/// The six metric functions of the Bondi line element.
#[derive(Debug, Clone, Copy)]
pub struct BondiFunctions<S> {
    pub beta: S,
    pub gamma: S,
    pub delta: S,
    pub u: S,
    pub v: S,
    pub w: S,
}

impl BondiExpansion {
    /// Pure Schwarzschild: every coefficient zero except `M = m`.
    pub fn schwarzschild(m: f64) -> Self {
        BondiExpansion {
            mass: AngularField::constant(m),
            ..Default::default()
        }
    }

    /// `l, l̄, p, p̄` from the news potentials and the aspects `N, P`.
    pub fn derived<S: Scalar>(&self, u: S, theta: S, psi: S) -> Derived<S> {
        let [c, _, c2, c3] = self.c.jet1(u, theta, psi);
        let [d, _, d2, d3] = self.d.jet1(u, theta, psi);
        let (s, co) = (theta.sin(), theta.cos());
        let cot = co / s;
        let csc = s.recip();
        let l = c2 + c * cot * 2.0 + d3 * csc;
        let l_bar = d2 + d * cot * 2.0 - c3 * csc;
        let p = self.n.eval(u, theta, psi) * 2.0
            + (c * c2 + d * d2) * 3.0
            + (c * c + d * d) * cot * 4.0
            - (c3 * d - c * d3) * csc * 2.0;
        let p_bar = self.p.eval(u, theta, psi) * 2.0
            + (c2 * d - c * d2) * 2.0
            + (c * c3 + d * d3) * csc * 3.0;
        Derived { l, l_bar, p, p_bar }
    }

    /// The metric functions with every series truncated after its last displayed term.
    pub fn functions<S: Scalar>(&self, u: S, r: S, theta: S, psi: S) -> BondiFunctions<S> {
        let c = self.c.eval(u, theta, psi);
        let d = self.d.eval(u, theta, psi);
        let der = self.derived(u, theta, psi);
        let ir = r.recip();
        let ir2 = ir * ir;
        let ir3 = ir2 * ir;
        let c2d2 = c * c + d * d;
        let gamma =
            c * ir + (self.big_c.eval(u, theta, psi) - c * c * c / 6.0 - c * d * d * 1.5) * ir3;
        let delta =
            d * ir + (self.big_h.eval(u, theta, psi) + c * c * d * 0.5 - d * d * d / 6.0) * ir3;
        let beta = -c2d2 * ir2 * 0.25;
        BondiFunctions {
            beta,
            gamma,
            delta,
            u: -der.l * ir2 + der.p * ir3,
            v: -r + self.mass.eval(u, theta, psi) * 2.0,
            w: -der.l_bar * ir2 + der.p_bar * ir3,
        }
    }

    /// Bound on the news potentials used to place the asymptotic region.
    pub fn news_sup(&self, u_samples: &[f64]) -> f64 {
        u_samples
            .iter()
            .map(|&u| self.c.sup_at(u, 16).max(self.d.sup_at(u, 16)))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_y20_matches_closed_form() {
        let y = AngularField::harmonic(2, 0, vec![1.0]).unwrap();
        for &t in &[0.3, 1.2, 2.5] {
            let expect = (5.0 / (4.0 * PI)).sqrt() * 0.5 * (3.0 * f64::cos(t).powi(2) - 1.0);
            assert!((y.eval(0.0, t, 0.7) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonics_are_orthonormal() {
        use crate::sphere::{SphereField, SphereGrid};
        let g = SphereGrid::new(12, 24).unwrap();
        let list: Vec<(u32, i32)> = vec![
            (0, 0),
            (1, -1),
            (1, 0),
            (1, 1),
            (2, -2),
            (2, 1),
            (3, 2),
            (3, -3),
        ];
        for &(l1, m1) in &list {
            for &(l2, m2) in &list {
                let a = AngularField::harmonic(l1, m1, vec![1.0]).unwrap();
                let b = AngularField::harmonic(l2, m2, vec![1.0]).unwrap();
                let f =
                    SphereField::from_fn(&g, |t, p| a.eval(0.0, t, p) * b.eval(0.0, t, p)).unwrap();
                let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!(
                    (f.integrate() - expect).abs() < 1e-12,
                    "({l1},{m1}) ({l2},{m2})"
                );
            }
        }
        assert!(AngularField::harmonic(1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn derived_fields_for_axisymmetric_news() {
        // c = sin²θ, d = 0: l = 4 sinθ cosθ, l̄ = 0
        let e = BondiExpansion {
            c: AngularField::monomial(vec![1.0], 2, 0, 0),
            ..Default::default()
        };
        for &t in &[0.2, 1.0, 2.9] {
            let der = e.derived(0.0, t, 1.3);
            assert!((der.l - 4.0 * t.sin() * t.cos()).abs() < 1e-14);
            assert_eq!(der.l_bar, 0.0);
        }
        let z = BondiExpansion::default().derived(1.0, 0.7, 0.2);
        assert_eq!((z.p, z.p_bar), (0.0, 0.0));
    }

    #[test]
    fn schwarzschild_functions() {
        let e = BondiExpansion::schwarzschild(2.0);
        let f = e.functions(3.0, 50.0, 1.0, 2.0);
        assert_eq!(f.v, -50.0 + 4.0);
        assert_eq!(
            (f.beta, f.gamma, f.delta, f.u, f.w),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }
}
