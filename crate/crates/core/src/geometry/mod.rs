//! Exact-derivative geometry of 4-metrics and of spacelike slices.
//!
//! Everything closed-form is generic over [`Scalar`]; first and second
//! derivatives come from instantiating it with nested dual numbers.

mod curvature;
mod metric;
mod pullback;

pub use curvature::{
    constraint_quantities, curvature3, frame_connection, metric_compatibility_residual,
    rigidity_residual, ConstraintQuantities, Curvature3, FrameConnection, PointAnalysis,
    RigidityResiduals,
};
pub use metric::{christoffel4, christoffel_generic, ricci4, ricci_residual, signature, MetricJet};
pub use pullback::Pullback;

use serde::Serialize;

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Mat4};

/// Coordinate chart of a spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart4 {
    /// `(t, x, y, z)`.
    Cartesian,
    /// `(t, r, θ, ψ)`.
    StaticPolar,
    /// `(u, r, θ, ψ)` with `u` a retarded (null) coordinate.
    Retarded,
}

impl Chart4 {
    pub fn is_polar(self) -> bool {
        !matches!(self, Chart4::Cartesian)
    }

    /// Scale factors turning coordinate components into unit-scaled ones.
    pub fn scale_factors(self, x: &[f64; 4]) -> [f64; 4] {
        match self {
            Chart4::Cartesian => [1.0; 4],
            _ => [1.0, 1.0, x[1], x[1] * x[2].sin()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimePoint {
    pub chart: Chart4,
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    pub fn new(chart: Chart4, coords: [f64; 4]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spacetime point".into()));
        }
        if chart.is_polar() {
            let [_, r, th, ps] = coords;
            let reason = if r <= 0.0 {
                Some("r must be positive")
            } else if !(th > 0.0 && th < std::f64::consts::PI) {
                Some("θ must lie in (0, π)")
            } else if !(0.0..2.0 * std::f64::consts::PI).contains(&ps) {
                Some("ψ must lie in [0, 2π)")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(Error::Domain {
                    point: coords.to_vec(),
                    reason: reason.into(),
                });
            }
        }
        Ok(SpacetimePoint { chart, coords })
    }
}

/// A Lorentzian 4-metric `g_{αβ}` with signature (−,+,+,+).
pub trait SpacetimeMetric: Sync {
    fn chart(&self) -> Chart4;

    /// Components at a chart point; symmetric by construction.
    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S>;

    /// Reject points outside the region where the evaluator is valid.
    fn check_domain(&self, _x: &[f64; 4]) -> Result<()> {
        Ok(())
    }
}

impl<M: SpacetimeMetric> SpacetimeMetric for &M {
    fn chart(&self) -> Chart4 {
        (**self).chart()
    }
    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        (**self).components(x)
    }
    fn check_domain(&self, x: &[f64; 4]) -> Result<()> {
        (**self).check_domain(x)
    }
}

/// Map from a 3-chart into a spacetime chart.
pub trait Embedding: Sync {
    fn target_chart(&self) -> Chart4;
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4];
}

impl<E: Embedding> Embedding for &E {
    fn target_chart(&self) -> Chart4 {
        (**self).target_chart()
    }
    fn map<S: Scalar>(&self, x: &[S; 3]) -> [S; 4] {
        (**self).map(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameKind {
    /// Coordinate basis `∂_x, ∂_y, ∂_z` of a Cartesian 3-chart.
    Cartesian,
    /// `ĕ_1 = √(1+r²) ∂_r`, `ĕ_2 = r⁻¹ ∂_θ`, `ĕ_3 = (r sin θ)⁻¹ ∂_ψ` on a polar 3-chart.
    Hyperbolic,
}

/// A frame on a 3-chart, optionally with each vector rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    pub kind: FrameKind,
    pub scales: [f64; 3],
}

impl Frame {
    pub const fn cartesian() -> Self {
        Frame {
            kind: FrameKind::Cartesian,
            scales: [1.0; 3],
        }
    }

    pub const fn hyperbolic() -> Self {
        Frame {
            kind: FrameKind::Hyperbolic,
            scales: [1.0; 3],
        }
    }

    pub fn scaled(self, scales: [f64; 3]) -> Self {
        Frame { scales, ..self }
    }

    /// `E[i][a]`: component `a` of frame vector `i` in the coordinate basis.
    pub fn vectors<S: Scalar>(&self, x: &[S; 3]) -> Mat3<S> {
        let [s1, s2, s3] = self.scales;
        match self.kind {
            FrameKind::Cartesian => [
                [S::cst(s1), S::zero(), S::zero()],
                [S::zero(), S::cst(s2), S::zero()],
                [S::zero(), S::zero(), S::cst(s3)],
            ],
            FrameKind::Hyperbolic => {
                let r = x[0];
                [
                    [(r.sq() + 1.0).sqrt() * s1, S::zero(), S::zero()],
                    [S::zero(), r.recip() * s2, S::zero()],
                    [S::zero(), S::zero(), (r * x[1].sin()).recip() * s3],
                ]
            }
        }
    }

    pub fn check_point(&self, x: &[f64; 3]) -> Result<()> {
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("chart point".into()));
        }
        let bad = match self.kind {
            FrameKind::Cartesian => x.iter().map(|c| c * c).sum::<f64>() == 0.0,
            FrameKind::Hyperbolic => x[0] <= 0.0 || !(x[1] > 0.0 && x[1] < std::f64::consts::PI),
        };
        if bad {
            return Err(Error::Domain {
                point: x.to_vec(),
                reason: "frame is singular here".into(),
            });
        }
        Ok(())
    }
}

/// Initial data `(g, p)` given as frame components on a 3-chart.
///
/// `p` need not be symmetric; [`InitialData::symmetric`] declares whether it is.
pub trait InitialData: Sync {
    fn frame(&self) -> Frame;
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>>;
    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>>;
    fn symmetric(&self) -> bool {
        true
    }
}

impl<D: InitialData> InitialData for &D {
    fn frame(&self) -> Frame {
        (**self).frame()
    }
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        (**self).metric(x)
    }
    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        (**self).second_form(x)
    }
    fn symmetric(&self) -> bool {
        (**self).symmetric()
    }
}

/// Chart point of the 3-chart attached to a frame, from sphere coordinates.
pub fn chart_point(frame: Frame, r: f64, theta: f64, psi: f64) -> [f64; 3] {
    match frame.kind {
        FrameKind::Hyperbolic => [r, theta, psi],
        FrameKind::Cartesian => [
            r * theta.sin() * psi.cos(),
            r * theta.sin() * psi.sin(),
            r * theta.cos(),
        ],
    }
}

/// Both fields at an `f64` point.
pub fn evaluate<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<(Mat3<f64>, Mat3<f64>)> {
    Ok((data.metric(x)?, data.second_form(x)?))
}
