use nalgebra::{Matrix4, SymmetricEigen};

use super::{SpacetimeMetric, SpacetimePoint};
use crate::dual::{seed, unpack2, Dual, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{inv4, Mat4};

/// Components with exact first and second coordinate derivatives.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: Mat4<f64>,
    /// `dg[c][a][b] = ∂_c g_ab`.
    pub dg: [Mat4<f64>; 4],
    /// `ddg[c][d][a][b] = ∂_c ∂_d g_ab`.
    pub ddg: [[Mat4<f64>; 4]; 4],
}

impl MetricJet {
    pub fn new<M: SpacetimeMetric>(metric: &M, x: [f64; 4]) -> Self {
        let comps = metric.components(&seed(seed(x)));
        let mut jet = MetricJet {
            g: [[0.0; 4]; 4],
            dg: [[[0.0; 4]; 4]; 4],
            ddg: [[[[0.0; 4]; 4]; 4]; 4],
        };
        for a in 0..4 {
            for b in 0..4 {
                let (v, grad, hess) = unpack2(&comps[a][b]);
                jet.g[a][b] = v;
                for c in 0..4 {
                    jet.dg[c][a][b] = grad[c];
                    for d in 0..4 {
                        jet.ddg[c][d][a][b] = hess[c][d];
                    }
                }
            }
        }
        jet
    }
}

/// `Γ^a_{bc}` at a generic point; `None` when the metric is singular.
pub fn christoffel_generic<S: Scalar, M: SpacetimeMetric>(
    metric: &M,
    x: &[S; 4],
) -> Option<[Mat4<S>; 4]> {
    let comps: Mat4<Dual<S, 4>> = metric.components(&seed(*x));
    let g: Mat4<S> = std::array::from_fn(|a| std::array::from_fn(|b| comps[a][b].v));
    let ginv = inv4(&g)?;
    let d = |c: usize, a: usize, b: usize| comps[a][b].d[c];
    // lowered: Γ_{dbc} = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
    let mut low = [[[S::zero(); 4]; 4]; 4];
    for (dd, low_d) in low.iter_mut().enumerate() {
        for b in 0..4 {
            for c in b..4 {
                let v = (d(b, dd, c) + d(c, dd, b) - d(dd, b, c)) * 0.5;
                low_d[b][c] = v;
                low_d[c][b] = v;
            }
        }
    }
    let mut out = [[[S::zero(); 4]; 4]; 4];
    for (a, out_a) in out.iter_mut().enumerate() {
        for b in 0..4 {
            for c in b..4 {
                let mut s = S::zero();
                for (dd, low_d) in low.iter().enumerate() {
                    s = s + ginv[a][dd] * low_d[b][c];
                }
                out_a[b][c] = s;
                out_a[c][b] = s;
            }
        }
    }
    Some(out)
}

fn check_point<M: SpacetimeMetric>(metric: &M, point: &SpacetimePoint) -> Result<()> {
    if point.chart != metric.chart() {
        return Err(Error::Usage(format!(
            "point is in chart {:?}, metric uses {:?}",
            point.chart,
            metric.chart()
        )));
    }
    metric.check_domain(&point.coords)
}

/// Christoffel symbols `Γ^α_{βγ}` of the Levi-Civita connection.
pub fn christoffel4<M: SpacetimeMetric>(
    metric: &M,
    point: &SpacetimePoint,
) -> Result<[Mat4<f64>; 4]> {
    check_point(metric, point)?;
    christoffel_generic(metric, &point.coords).ok_or(Error::DegenerateMetric(point.coords))
}

/// Coordinate components of the Ricci tensor.
pub fn ricci4<M: SpacetimeMetric>(metric: &M, point: &SpacetimePoint) -> Result<Mat4<f64>> {
    check_point(metric, point)?;
    let gam = christoffel_generic(metric, &seed(point.coords))
        .ok_or(Error::DegenerateMetric(point.coords))?;
    let v = |a: usize, b: usize, c: usize| gam[a][b][c].v;
    let dv = |e: usize, a: usize, b: usize, c: usize| gam[a][b][c].d[e];
    let mut ric = [[0.0; 4]; 4];
    for b in 0..4 {
        for d in b..4 {
            let mut s = 0.0;
            for a in 0..4 {
                s += dv(a, a, d, b) - dv(d, a, a, b);
                for e in 0..4 {
                    s += v(a, a, e) * v(e, d, b) - v(a, d, e) * v(e, a, b);
                }
            }
            ric[b][d] = s;
            ric[d][b] = s;
        }
    }
    Ok(ric)
}

/// Frobenius norm of the Ricci tensor in the chart's unit-scaled basis
/// (angular components divided by `r` and `r sin θ`).
pub fn ricci_residual<M: SpacetimeMetric>(metric: &M, point: &SpacetimePoint) -> Result<f64> {
    let ric = ricci4(metric, point)?;
    let s = point.chart.scale_factors(&point.coords);
    let mut sum = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            sum += (ric[a][b] / (s[a] * s[b])).powi(2);
        }
    }
    Ok(sum.sqrt())
}

/// Counts of (negative, positive) eigenvalues of `g_{αβ}`.
pub fn signature<M: SpacetimeMetric>(metric: &M, x: &[f64; 4]) -> (usize, usize) {
    let g = metric.components(x);
    let m = Matrix4::from_fn(|a, b| g[a][b]);
    let eig = SymmetricEigen::new(m);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-14 * scale;
    let neg = eig.eigenvalues.iter().filter(|&&v| v < -tol).count();
    let pos = eig.eigenvalues.iter().filter(|&&v| v > tol).count();
    (neg, pos)
}
