//! Catalog of exact and asymptotic 4-metrics and of the slices studied in them.

mod embeddings;

pub use embeddings::{
    BondiSlice, CartesianSlice, Hyperboloid, PolarFromCartesianSlice, SliceSpec, StaticSlice,
};

use serde::Serialize;

use crate::bondi::BondiExpansion;
use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::geometry::{Chart4, SpacetimeMetric};
use crate::linalg::Mat4;

fn domain_error(x: &[f64; 4], reason: impl Into<String>) -> Error {
    Error::Domain {
        point: x.to_vec(),
        reason: reason.into(),
    }
}

fn polar_diag<S: Scalar>(gtt: S, grr: S, r: S, theta: S) -> Mat4<S> {
    let mut g = [[S::zero(); 4]; 4];
    g[0][0] = gtt;
    g[1][1] = grr;
    g[2][2] = r.sq();
    g[3][3] = (r * theta.sin()).sq();
    g
}

/// Flat space in Cartesian, static polar or retarded (`u = t − r`) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minkowski {
    pub chart: Chart4,
}

impl Minkowski {
    pub fn new(chart: Chart4) -> Self {
        Minkowski { chart }
    }
}

impl SpacetimeMetric for Minkowski {
    fn chart(&self) -> Chart4 {
        self.chart
    }

    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        match self.chart {
            Chart4::Cartesian => {
                let mut g = [[S::zero(); 4]; 4];
                g[0][0] = -S::one();
                for (i, row) in g.iter_mut().enumerate().skip(1) {
                    row[i] = S::one();
                }
                g
            }
            Chart4::StaticPolar => polar_diag(-S::one(), S::one(), x[1], x[2]),
            Chart4::Retarded => {
                let mut g = polar_diag(-S::one(), S::zero(), x[1], x[2]);
                g[0][1] = -S::one();
                g[1][0] = -S::one();
                g
            }
        }
    }
}

/// Schwarzschild exterior in static `(t, r, θ, ψ)` or retarded `(u, r, θ, ψ)` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schwarzschild {
    pub m: f64,
    pub chart: Chart4,
}

impl Schwarzschild {
    pub fn new(m: f64, chart: Chart4) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Precondition(format!(
                "mass must be positive, got {m}"
            )));
        }
        if !chart.is_polar() {
            return Err(Error::Usage(
                "Schwarzschild is provided in polar charts only".into(),
            ));
        }
        Ok(Schwarzschild { m, chart })
    }
}

impl SpacetimeMetric for Schwarzschild {
    fn chart(&self) -> Chart4 {
        self.chart
    }

    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        let r = x[1];
        let f = -(r.recip() * (2.0 * self.m)) + 1.0;
        match self.chart {
            Chart4::Retarded => {
                let mut g = polar_diag(-f, S::zero(), r, x[2]);
                g[0][1] = -S::one();
                g[1][0] = -S::one();
                g
            }
            _ => polar_diag(-f, f.recip(), r, x[2]),
        }
    }

    fn check_domain(&self, x: &[f64; 4]) -> Result<()> {
        if x[1] <= 2.0 * self.m {
            return Err(domain_error(x, "r ≤ 2m: outside the exterior region"));
        }
        Ok(())
    }
}

/// Mass `m` and angular momentum per unit mass `a` of a Kerr black hole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrParameters {
    pub m: f64,
    pub a: f64,
}

impl KerrParameters {
    pub fn new(m: f64, a: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite() && a.is_finite()) {
            return Err(Error::Precondition(format!(
                "need m > 0 and finite a, got m = {m}, a = {a}"
            )));
        }
        Ok(KerrParameters { m, a })
    }

    /// `Σ = r² + a² cos²θ`.
    pub fn sigma<S: Scalar>(&self, r: S, theta: S) -> S {
        r.sq() + theta.cos().sq() * (self.a * self.a)
    }

    /// `Δ = r² − 2mr + a²`.
    pub fn delta<S: Scalar>(&self, r: S) -> S {
        r.sq() - r * (2.0 * self.m) + self.a * self.a
    }

    /// Outer root of `Δ`, or `None` when there is no horizon.
    pub fn outer_horizon(&self) -> Option<f64> {
        let disc = self.m * self.m - self.a * self.a;
        (disc >= 0.0).then(|| self.m + disc.sqrt())
    }
}

/// Kerr in Boyer–Lindquist coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kerr {
    pub params: KerrParameters,
}

impl Kerr {
    pub fn new(params: KerrParameters) -> Self {
        Kerr { params }
    }
}

impl SpacetimeMetric for Kerr {
    fn chart(&self) -> Chart4 {
        Chart4::StaticPolar
    }

    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        let KerrParameters { m, a } = self.params;
        let (r, th) = (x[1], x[2]);
        let sig = self.params.sigma(r, th);
        let del = self.params.delta(r);
        let s2 = th.sin().sq();
        let mut g = [[S::zero(); 4]; 4];
        g[0][0] = -(-(r * (2.0 * m) / sig) + 1.0);
        g[0][3] = -(r * s2 * (2.0 * m * a) / sig);
        g[3][0] = g[0][3];
        g[1][1] = sig / del;
        g[2][2] = sig;
        g[3][3] = (r.sq() + a * a + r * s2 * (2.0 * m * a * a) / sig) * s2;
        g
    }

    fn check_domain(&self, x: &[f64; 4]) -> Result<()> {
        let r = x[1];
        if self.params.delta(r) <= 0.0 || self.params.outer_horizon().is_some_and(|rp| r <= rp) {
            return Err(domain_error(x, "Δ ≤ 0: outside the exterior region"));
        }
        Ok(())
    }
}

/// Bondi radiating metric assembled from truncated asymptotic series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BondiMetric {
    pub expansion: BondiExpansion,
    pub r_min: f64,
}

impl BondiMetric {
    /// `r_min = 5 · max(1, sup|c|, sup|d|)` with the suprema taken over
    /// `u ∈ [u_lo, u_hi]`.
    pub fn new(expansion: BondiExpansion, u_window: (f64, f64)) -> Result<Self> {
        let (lo, hi) = u_window;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Usage(format!(
                "invalid retarded-time window [{lo}, {hi}]"
            )));
        }
        let samples: Vec<f64> = (0..=8).map(|k| lo + (hi - lo) * k as f64 / 8.0).collect();
        let r_min = 5.0 * expansion.news_sup(&samples).max(1.0);
        Ok(BondiMetric { expansion, r_min })
    }

    pub fn with_r_min(expansion: BondiExpansion, r_min: f64) -> Self {
        BondiMetric { expansion, r_min }
    }
}

impl SpacetimeMetric for BondiMetric {
    fn chart(&self) -> Chart4 {
        Chart4::Retarded
    }

    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        let [u, r, th, ps] = *x;
        let f = self.expansion.functions(u, r, th, ps);
        let e2b = (f.beta * 2.0).exp();
        let e2g = (f.gamma * 2.0).exp();
        let em2g = e2g.recip();
        let ch = (f.delta * 2.0).cosh();
        let sh = (f.delta * 2.0).sinh();
        let r2 = r.sq();
        let st = th.sin();
        let mut g = [[S::zero(); 4]; 4];
        g[0][0] = f.v / r * e2b
            + r2 * (e2g * f.u.sq() * ch + em2g * f.w.sq() * ch + f.u * f.w * sh * 2.0);
        g[0][1] = -e2b;
        g[0][2] = -(r2 * (e2g * f.u * ch + f.w * sh));
        g[0][3] = -(r2 * (em2g * f.w * ch + f.u * sh) * st);
        g[2][2] = r2 * e2g * ch;
        g[3][3] = r2 * em2g * ch * st.sq();
        g[2][3] = r2 * sh * st;
        for a in 0..4 {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        g
    }

    fn check_domain(&self, x: &[f64; 4]) -> Result<()> {
        if x[1] < self.r_min {
            return Err(domain_error(
                x,
                format!("r below r_min = {} of the truncated expansion", self.r_min),
            ));
        }
        Ok(())
    }
}

/// Any catalog metric, for runtime dispatch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Spacetime {
    Minkowski(Minkowski),
    Schwarzschild(Schwarzschild),
    Kerr(Kerr),
    Bondi(BondiMetric),
}

impl SpacetimeMetric for Spacetime {
    fn chart(&self) -> Chart4 {
        match self {
            Spacetime::Minkowski(m) => m.chart(),
            Spacetime::Schwarzschild(m) => m.chart(),
            Spacetime::Kerr(m) => m.chart(),
            Spacetime::Bondi(m) => m.chart(),
        }
    }

    fn components<S: Scalar>(&self, x: &[S; 4]) -> Mat4<S> {
        match self {
            Spacetime::Minkowski(m) => m.components(x),
            Spacetime::Schwarzschild(m) => m.components(x),
            Spacetime::Kerr(m) => m.components(x),
            Spacetime::Bondi(m) => m.components(x),
        }
    }

    fn check_domain(&self, x: &[f64; 4]) -> Result<()> {
        match self {
            Spacetime::Minkowski(m) => m.check_domain(x),
            Spacetime::Schwarzschild(m) => m.check_domain(x),
            Spacetime::Kerr(m) => m.check_domain(x),
            Spacetime::Bondi(m) => m.check_domain(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::bondi::AngularField;
    use crate::geometry::{christoffel4, ricci_residual, signature, SpacetimePoint};

    fn pt(chart: Chart4, x: [f64; 4]) -> SpacetimePoint {
        SpacetimePoint::new(chart, x).unwrap()
    }

    #[test]
    fn minkowski_components() {
        let g = Minkowski::new(Chart4::StaticPolar).components(&[0.0, 3.0, 1.0, 0.5]);
        assert_eq!((g[0][0], g[1][1], g[2][2]), (-1.0, 1.0, 9.0));
        let g = Minkowski::new(Chart4::Retarded).components(&[0.0, 3.0, 1.0, 0.5]);
        assert_eq!((g[0][0], g[0][1], g[1][1]), (-1.0, -1.0, 0.0));
    }

    #[test]
    fn christoffel_oracles() {
        let gam = christoffel4(
            &Minkowski::new(Chart4::Cartesian),
            &pt(Chart4::Cartesian, [0.0, 1.0, 2.0, 3.0]),
        )
        .unwrap();
        assert!(gam.iter().flatten().flatten().all(|&v| v == 0.0));
        let gam = christoffel4(
            &Minkowski::new(Chart4::StaticPolar),
            &pt(Chart4::StaticPolar, [0.0, 4.0, 1.0, 1.0]),
        )
        .unwrap();
        assert!((gam[1][2][2] + 4.0).abs() < 1e-14);
        let (m, r) = (1.5, 7.0);
        let s = Schwarzschild::new(m, Chart4::StaticPolar).unwrap();
        let gam = christoffel4(&s, &pt(Chart4::StaticPolar, [0.0, r, 1.0, 1.0])).unwrap();
        assert!((gam[1][0][0] - m * (r - 2.0 * m) / r.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn schwarzschild_forms_and_domain() {
        let s = Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap();
        let g = s.components(&[0.0, 8.0, 1.0, 0.0]);
        assert!((g[0][0] + 0.75).abs() < 1e-15);
        let s = Schwarzschild::new(1.0, Chart4::Retarded).unwrap();
        assert_eq!(s.components(&[0.0, 8.0, 1.0, 0.0])[0][1], -1.0);
        assert!(s.check_domain(&[0.0, 2.0, 1.0, 0.0]).is_err());
        assert!(ricci_residual(&s, &pt(Chart4::Retarded, [0.0, 1.5, 1.0, 0.0])).is_err());
        assert!(Schwarzschild::new(0.0, Chart4::StaticPolar).is_err());
    }

    #[test]
    fn kerr_cross_term_and_degeneration() {
        let k = Kerr::new(KerrParameters::new(1.0, 0.5).unwrap());
        let g = k.components(&[0.0, 10.0, PI / 2.0, 0.0]);
        // −2·m·a·r·sin²θ/Σ with Σ = r² at the equator
        assert!((g[0][3] - (-2.0 * 1.0 * 0.5 * 10.0 / 100.0)).abs() < 1e-15);
        let k0 = Kerr::new(KerrParameters::new(1.3, 0.0).unwrap());
        let s = Schwarzschild::new(1.3, Chart4::StaticPolar).unwrap();
        for &(r, th) in &[(3.0, 0.4), (10.0, 1.7), (50.0, 2.9)] {
            let a = k0.components(&[0.0, r, th, 0.3]);
            let b = s.components(&[0.0, r, th, 0.3]);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((a[i][j] - b[i][j]).abs() <= 1e-14 * b[i][j].abs().max(1.0));
                }
            }
        }
        let k = Kerr::new(KerrParameters::new(1.0, 0.6).unwrap());
        assert!(k.check_domain(&[0.0, 1.8, 1.0, 0.0]).is_err());
        assert!(k.check_domain(&[0.0, 1.5, 1.0, 0.0]).is_err());
        assert!(k.check_domain(&[0.0, 2.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn vacuum_and_signature() {
        let metrics = [
            Spacetime::Minkowski(Minkowski::new(Chart4::StaticPolar)),
            Spacetime::Minkowski(Minkowski::new(Chart4::Retarded)),
            Spacetime::Schwarzschild(Schwarzschild::new(1.0, Chart4::StaticPolar).unwrap()),
            Spacetime::Schwarzschild(Schwarzschild::new(1.0, Chart4::Retarded).unwrap()),
            Spacetime::Kerr(Kerr::new(KerrParameters::new(1.0, 0.7).unwrap())),
        ];
        for m in &metrics {
            for &(r, th) in &[(3.0, 0.3), (6.0, 1.1), (20.0, 2.0), (200.0, 2.8)] {
                let x = [0.3, r, th, 1.0];
                assert!(
                    ricci_residual(m, &pt(m.chart(), x)).unwrap() < 1e-9,
                    "{m:?} at {x:?}"
                );
                assert_eq!(signature(m, &x), (1, 3));
            }
        }
    }

    #[test]
    fn bondi_reduces_to_schwarzschild_retarded() {
        let b = BondiMetric::new(BondiExpansion::schwarzschild(1.0), (0.0, 1.0)).unwrap();
        let s = Schwarzschild::new(1.0, Chart4::Retarded).unwrap();
        let x = [0.4, 12.0, 0.8, 2.0];
        assert_eq!(b.components(&x), s.components(&x));
        assert_eq!(b.r_min, 5.0);
        assert!(b.check_domain(&[0.0, 4.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn bondi_leading_angular_terms() {
        // c = 0.3 sin²θ cosψ, d = 0.2 sin θ cos θ sin ψ (u-independent)
        let e = BondiExpansion {
            c: AngularField::monomial(vec![0.3], 2, 0, 1),
            d: AngularField::monomial(vec![0.2], 1, 1, -1),
            ..Default::default()
        };
        let b = BondiMetric::with_r_min(e.clone(), 1.0);
        let (th, ps) = (1.1, 0.7);
        let c = e.c.eval(0.0, th, ps);
        let l = e.derived(0.0, th, ps).l;
        // g_θθ / r² = 1 + 2c/r + O(r⁻²); 2 g_uθ → 2l
        let coef = |r: f64| (b.components(&[0.0, r, th, ps])[2][2] / (r * r) - 1.0) * r;
        assert!((coef(1e4) - 2.0 * c).abs() < 1e-3);
        assert!((coef(1e5) - 2.0 * c).abs() < 1e-4);
        let cross = |r: f64| 2.0 * b.components(&[0.0, r, th, ps])[0][2];
        assert!((cross(1e4) - 2.0 * l).abs() < 1e-3);
        assert!((cross(1e5) - 2.0 * l).abs() < 1e-4);
    }
}
