//! Closed-form initial data used as models and test beds.

use serde::Serialize;

use crate::dual::Scalar;
use crate::error::Result;
use crate::geometry::{Frame, InitialData};
use crate::linalg::Mat3;

fn identity<S: Scalar>() -> Mat3<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
}

/// The hyperboloid model `(ğ, h̆)` in the frame `ĕ_i`: both are the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct HyperboloidModel;

impl InitialData for HyperboloidModel {
    fn frame(&self) -> Frame {
        Frame::hyperbolic()
    }
    fn metric<S: Scalar>(&self, _x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(identity())
    }
    fn second_form<S: Scalar>(&self, _x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(identity())
    }
}

/// Hyperboloid data deformed by `a_ij = ε_a f(r) A_ij` and
/// `b_ij = ε_b f(r) (A_ij + κ K_ij)` with `f = (1+r²)^(−τ/2)`, a fixed smooth
/// symmetric angular pattern `A` and a fixed antisymmetric `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbedHyperboloid {
    pub eps_metric: f64,
    pub eps_form: f64,
    pub tau: f64,
    /// Weight of the antisymmetric part of `b`; zero gives symmetric `p`.
    pub antisym: f64,
}

impl PerturbedHyperboloid {
    pub fn symmetric(eps_metric: f64, eps_form: f64, tau: f64) -> Self {
        PerturbedHyperboloid {
            eps_metric,
            eps_form,
            tau,
            antisym: 0.0,
        }
    }

    fn profile<S: Scalar>(&self, r: S) -> S {
        ((r.sq() + 1.0).ln() * (-0.5 * self.tau)).exp()
    }

    fn pattern<S: Scalar>(th: S, ps: S) -> Mat3<S> {
        let (st, ct) = (th.sin(), th.cos());
        let (sp, cp) = (ps.sin(), ps.cos());
        let mut m = [[S::zero(); 3]; 3];
        m[0][0] = ct * 0.3 + 1.0;
        m[1][1] = st * cp * 0.4 - 0.5;
        m[2][2] = (st * sp) * 0.2 + ct.sq() * 0.7;
        m[0][1] = st * sp * 0.25;
        m[0][2] = ct * cp * 0.15 + 0.1;
        m[1][2] = st * st * (ps * 2.0).cos() * 0.3;
        for i in 0..3 {
            for j in 0..i {
                m[i][j] = m[j][i];
            }
        }
        m
    }

    fn antisymmetric<S: Scalar>(th: S, ps: S) -> Mat3<S> {
        let mut k = [[S::zero(); 3]; 3];
        k[0][1] = th.cos() * 0.5;
        k[0][2] = th.sin() * ps.cos() * 0.3;
        k[1][2] = th.sin() * ps.sin() * 0.4 - 0.2;
        for i in 0..3 {
            for j in 0..i {
                k[i][j] = -k[j][i];
            }
        }
        k
    }
}

impl InitialData for PerturbedHyperboloid {
    fn frame(&self) -> Frame {
        Frame::hyperbolic()
    }

    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let f = self.profile(x[0]) * self.eps_metric;
        let a = Self::pattern(x[1], x[2]);
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][j] * f + if i == j { 1.0 } else { 0.0 })
        }))
    }

    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let f = self.profile(x[0]) * self.eps_form;
        let a = Self::pattern(x[1], x[2]);
        let k = Self::antisymmetric(x[1], x[2]);
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (a[i][j] + k[i][j] * self.antisym) * f + if i == j { 1.0 } else { 0.0 }
            })
        }))
    }

    fn symmetric(&self) -> bool {
        self.antisym == 0.0
    }
}

/// `g = (1 + k r^(−τ)) ğ`, `p = h̆`: a conformally rescaled hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalHyperboloid {
    pub k: f64,
    pub tau: f64,
}

impl ConformalHyperboloid {
    /// `φ(r) = k r^(−τ)`.
    pub fn phi<S: Scalar>(&self, r: S) -> S {
        (r.ln() * -self.tau).exp() * self.k
    }
}

impl InitialData for ConformalHyperboloid {
    fn frame(&self) -> Frame {
        Frame::hyperbolic()
    }
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let s = self.phi(x[0]) + 1.0;
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { s } else { S::zero() })
        }))
    }
    fn second_form<S: Scalar>(&self, _x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(identity())
    }
}

/// Conformally flat data with prescribed energy and momentum:
/// `g = (1 + E/(2r))⁴ δ`, `h_ij = 3/(2r²) (P_i n_j + P_j n_i − (δ_ij − n_i n_j) P·n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BowenYork {
    pub energy: f64,
    pub momentum: [f64; 3],
}

impl InitialData for BowenYork {
    fn frame(&self) -> Frame {
        Frame::cartesian()
    }

    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let r = (x[0].sq() + x[1].sq() + x[2].sq()).sqrt();
        let psi4 = (r.recip() * (0.5 * self.energy) + 1.0).powi(4);
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { psi4 } else { S::zero() })
        }))
    }

    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let r = (x[0].sq() + x[1].sq() + x[2].sq()).sqrt();
        let n: [S; 3] = std::array::from_fn(|i| x[i] / r);
        let p = self.momentum;
        let pn = n[0] * p[0] + n[1] * p[1] + n[2] * p[2];
        let k = r.sq().recip() * 1.5;
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let dij = if i == j { 1.0 } else { 0.0 };
                (n[j] * p[i] + n[i] * p[j] - (-(n[i] * n[j]) + dij) * pn) * k
            })
        }))
    }
}

/// Data `D` seen through a rotated Cartesian chart: `g'(x) = R g(Rᵀx) Rᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rotated<D> {
    pub inner: D,
    pub rotation: Mat3<f64>,
}

impl<D> Rotated<D> {
    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn about(inner: D, axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let k = axis.map(|a| a / n);
        let (s, c) = angle.sin_cos();
        let rotation = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let cross = match (i, j) {
                    (0, 1) => -k[2],
                    (0, 2) => k[1],
                    (1, 0) => k[2],
                    (1, 2) => -k[0],
                    (2, 0) => -k[1],
                    (2, 1) => k[0],
                    _ => 0.0,
                };
                let d = if i == j { c } else { 0.0 };
                d + s * cross + (1.0 - c) * k[i] * k[j]
            })
        });
        Rotated { inner, rotation }
    }

    fn conjugate<S: Scalar>(&self, m: &Mat3<S>) -> Mat3<S> {
        let r = &self.rotation;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = S::zero();
                for a in 0..3 {
                    for b in 0..3 {
                        s = s + m[a][b] * (r[i][a] * r[j][b]);
                    }
                }
                s
            })
        })
    }

    fn pull<S: Scalar>(&self, x: &[S; 3]) -> [S; 3] {
        std::array::from_fn(|a| {
            let mut s = S::zero();
            for i in 0..3 {
                s = s + x[i] * self.rotation[i][a];
            }
            s
        })
    }
}

impl<D: InitialData> InitialData for Rotated<D> {
    fn frame(&self) -> Frame {
        self.inner.frame()
    }
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(self.conjugate(&self.inner.metric(&self.pull(x))?))
    }
    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(self.conjugate(&self.inner.second_form(&self.pull(x))?))
    }
    fn symmetric(&self) -> bool {
        self.inner.symmetric()
    }
}

/// The cylinder `ℝ × S²(ρ)`: `dr² + ρ²(dθ² + sin²θ dψ²)`, with `p = 0`,
/// written in the hyperbolic frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundCylinder {
    pub rho: f64,
}

impl InitialData for RoundCylinder {
    fn frame(&self) -> Frame {
        Frame::hyperbolic()
    }
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        let r = x[0];
        let ang = (r.recip() * self.rho).sq();
        let mut g = [[S::zero(); 3]; 3];
        g[0][0] = r.sq() + 1.0;
        g[1][1] = ang;
        g[2][2] = ang;
        Ok(g)
    }
    fn second_form<S: Scalar>(&self, _x: &[S; 3]) -> Result<Mat3<S>> {
        Ok([[S::zero(); 3]; 3])
    }
}
