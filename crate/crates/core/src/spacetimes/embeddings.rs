use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bondi::{AngularField, BondiExpansion};
use crate::dual::Scalar;
use crate::geometry::{Chart4, Embedding};

/// `√(1+r²) − r`, written without cancellation.
pub(crate) fn hyperbolic_lag<S: Scalar>(r: S) -> S {
    ((r.sq() + 1.0).sqrt() + r).recip()
}

/// `t = t₀` in a polar chart: `(r, θ, ψ) ↦ (t₀, r, θ, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticSlice {
    pub t0: f64,
    pub chart: Chart4,
}

impl StaticSlice {
    pub fn new(t0: f64) -> Self {
        StaticSlice {
            t0,
            chart: Chart4::StaticPolar,
        }
    }
}

impl Embedding for StaticSlice {
    fn target_chart(&self) -> Chart4 {
        self.chart
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        [S::cst(self.t0), x[0], x[1], x[2]]
    }
}

/// `t = t₀` with Cartesian coordinates on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianSlice {
    pub t0: f64,
}

impl Embedding for CartesianSlice {
    fn target_chart(&self) -> Chart4 {
        Chart4::Cartesian
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        [S::cst(self.t0), x[0], x[1], x[2]]
    }
}

/// `t = t₀` with a Cartesian 3-chart mapped into a static polar chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarFromCartesianSlice {
    pub t0: f64,
}

impl Embedding for PolarFromCartesianSlice {
    fn target_chart(&self) -> Chart4 {
        Chart4::StaticPolar
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        let r = (x[0].sq() + x[1].sq() + x[2].sq()).sqrt();
        let mut psi = x[1].atan2(x[0]);
        if psi.value() < 0.0 {
            psi = psi + 2.0 * PI;
        }
        [S::cst(self.t0), r, (x[2] / r).acos(), psi]
    }
}

/// The unit hyperboloid `t = √(1+r²)`, in static polar coordinates or in
/// retarded form `u = t − r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperboloid {
    pub chart: Chart4,
}

impl Hyperboloid {
    pub fn static_polar() -> Self {
        Hyperboloid {
            chart: Chart4::StaticPolar,
        }
    }

    pub fn retarded() -> Self {
        Hyperboloid {
            chart: Chart4::Retarded,
        }
    }
}

impl Embedding for Hyperboloid {
    fn target_chart(&self) -> Chart4 {
        self.chart
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        let t = match self.chart {
            Chart4::Retarded => hyperbolic_lag(x[0]),
            _ => (x[0].sq() + 1.0).sqrt(),
        };
        [t, x[0], x[1], x[2]]
    }
}

/// Shape of an asymptotically null slice in a Bondi spacetime.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub u0: f64,
    /// Free `r⁻⁴` coefficient (evaluated at `u = 0`; only `θ, ψ` matter).
    pub a3: AngularField,
    /// Optional `r⁻⁵` term standing in for the `o(r⁻⁴)` remainder; zero by default.
    #[serde(default)]
    pub a4: AngularField,
}

/// `u = u₀ + √(1+r²) − r + (c²+d²)|_{u₀}/(12r³) + a₃/r⁴ (+ a₄/r⁵)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BondiSlice {
    pub spec: SliceSpec,
    pub expansion: BondiExpansion,
}

impl BondiSlice {
    pub fn new(spec: SliceSpec, expansion: BondiExpansion) -> Self {
        BondiSlice { spec, expansion }
    }

    /// Retarded time of the slice over `(r, θ, ψ)`.
    pub fn retarded_time<S: Scalar>(&self, r: S, theta: S, psi: S) -> S {
        let u0 = S::cst(self.spec.u0);
        let c = self.expansion.c.eval(u0, theta, psi);
        let d = self.expansion.d.eval(u0, theta, psi);
        let ir = r.recip();
        let ir3 = ir.sq() * ir;
        let zero = S::zero();
        let mut u = u0
            + hyperbolic_lag(r)
            + (c.sq() + d.sq()) * ir3 / 12.0
            + self.spec.a3.eval(zero, theta, psi) * ir3 * ir;
        if !self.spec.a4.is_zero() {
            u = u + self.spec.a4.eval(zero, theta, psi) * ir3 * ir.sq();
        }
        u
    }
}

impl Embedding for BondiSlice {
    fn target_chart(&self) -> Chart4 {
        Chart4::Retarded
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        [self.retarded_time(x[0], x[1], x[2]), x[0], x[1], x[2]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperboloid_values() {
        let h = Hyperboloid::static_polar();
        assert!((h.map(&[1e-9, 1.0, 0.0])[0] - 1.0).abs() < 1e-15);
        let r: f64 = 1e6;
        let u = Hyperboloid::retarded().map(&[r, 1.0, 0.0])[0];
        assert!((u * 2.0 * r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bondi_slice_corrections() {
        let s = BondiSlice::new(
            SliceSpec {
                u0: 0.7,
                ..Default::default()
            },
            BondiExpansion::schwarzschild(1.0),
        );
        let r: f64 = 3.0;
        assert_eq!(
            s.map(&[r, 1.0, 2.0])[0],
            0.7 + 1.0 / ((1.0 + r * r).sqrt() + r)
        );

        // c² + d² = 1 at u₀ = 0
        let e = BondiExpansion {
            c: AngularField::constant(0.6),
            d: AngularField::constant(0.8),
            ..Default::default()
        };
        let s = BondiSlice::new(SliceSpec::default(), e);
        let corr = s.map(&[10.0, 1.0, 2.0])[0] - hyperbolic_lag(10.0);
        assert!((corr - 1.0 / 12000.0).abs() < 1e-17);
    }

    #[test]
    fn polar_from_cartesian_angles() {
        let e = PolarFromCartesianSlice { t0: 0.0 };
        let [_, r, th, ps] = e.map(&[0.0, -2.0, 0.0]);
        assert_eq!(r, 2.0);
        assert!((th - PI / 2.0).abs() < 1e-15 && (ps - 1.5 * PI).abs() < 1e-15);
    }
}
