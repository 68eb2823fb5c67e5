//! Quadrature, sampling and angular differentiation on the unit sphere.
//!
//! The grid is a Gauss–Legendre rule in `cos θ` times a uniform rule in `ψ`.
//! Poles are never sampled, so `cot θ` and `csc θ` stay finite at every node.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

/// Half-width of the θ finite-difference stencil (9 points, 8th order).
const STENCIL_HALF: usize = 4;

/// Default grid used by the charge integrators.
pub const DEFAULT_N_THETA: usize = 48;
pub const DEFAULT_N_PSI: usize = 96;

#[derive(Debug, Clone, Serialize)]
pub struct SphereGrid {
    n_theta: usize,
    n_psi: usize,
    theta: Vec<f64>,
    psi: Vec<f64>,
    /// Product weights, row-major in (θ, ψ).
    weights: Vec<f64>,
    #[serde(skip)]
    theta_stencils: Vec<(usize, Vec<f64>)>,
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes descending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = p0;
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
    }
    (nodes, weights)
}

/// Weights of the first-derivative Lagrange stencil at `x0`.
fn derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|k| {
            let mut total = 0.0;
            for m in 0..n {
                if m == k {
                    continue;
                }
                let mut term = 1.0 / (xs[k] - xs[m]);
                for l in 0..n {
                    if l != k && l != m {
                        term *= (x0 - xs[l]) / (xs[k] - xs[l]);
                    }
                }
                total += term;
            }
            total
        })
        .collect()
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_psi: usize) -> Result<Arc<Self>> {
        if n_theta < 2 {
            return Err(Error::Config(format!(
                "n_theta must be >= 2, got {n_theta}"
            )));
        }
        if n_psi < 4 || n_psi % 2 != 0 {
            return Err(Error::Config(format!(
                "n_psi must be even and >= 4, got {n_psi}"
            )));
        }
        let (x, w) = gauss_legendre(n_theta);
        // x descending, so θ = acos x ascending
        let theta: Vec<f64> = x.iter().map(|c| c.acos()).collect();
        let dpsi = 2.0 * PI / n_psi as f64;
        let psi: Vec<f64> = (0..n_psi).map(|j| j as f64 * dpsi).collect();
        let weights = w
            .iter()
            .flat_map(|&wi| std::iter::repeat(wi * dpsi).take(n_psi))
            .collect();

        let width = (2 * STENCIL_HALF + 1).min(n_theta);
        let theta_stencils = (0..n_theta)
            .map(|i| {
                let start = i.saturating_sub(STENCIL_HALF).min(n_theta - width);
                let w = derivative_weights(theta[i], &theta[start..start + width]);
                (start, w)
            })
            .collect();
        Ok(Arc::new(SphereGrid {
            n_theta,
            n_psi,
            theta,
            psi,
            weights,
            theta_stencils,
        }))
    }

    pub fn default_grid() -> Arc<Self> {
        Self::new(DEFAULT_N_THETA, DEFAULT_N_PSI).expect("default grid sizes are valid")
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_psi(&self) -> usize {
        self.n_psi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_psi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn psis(&self) -> &[f64] {
        &self.psi
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node `(θ, ψ)` at flat index `k`.
    pub fn node(&self, k: usize) -> (f64, f64) {
        (self.theta[k / self.n_psi], self.psi[k % self.n_psi])
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }
}

/// Neumaier-compensated sum; order-deterministic.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in iter {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Theta,
    Psi,
}

/// Real samples of a scalar on a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct SphereField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl SphereField {
    pub fn new(grid: &Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "field has {} samples, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (t, p) = grid.node(k);
            return Err(Error::NonFinite(format!(
                "sphere field at node (θ={t}, ψ={p})"
            )));
        }
        Ok(SphereField {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Sample `f(θ, ψ)` at every node (in parallel, deterministic layout).
    pub fn from_fn<F>(grid: &Arc<SphereGrid>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (t, p) = grid.node(k);
                f(t, p)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &SphereField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(Error::Usage("fields live on different grids".into()));
        }
        Self::new(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ w_ij f_ij`.
    pub fn integrate(&self) -> f64 {
        compensated_sum(
            self.values
                .iter()
                .zip(&self.grid.weights)
                .map(|(f, w)| f * w),
        )
    }

    /// `(1/4π) ∫ f n^ν dS`.
    pub fn project_multipole(&self, nu: usize) -> Result<f64> {
        if nu > 3 {
            return Err(Error::Usage(format!(
                "multipole index ν must be in 0..=3, got {nu}"
            )));
        }
        let terms = self.values.iter().enumerate().map(|(k, f)| {
            let (t, p) = self.grid.node(k);
            f * direction(nu, t, p) * self.grid.weights[k]
        });
        Ok(compensated_sum(terms) / (4.0 * PI))
    }

    pub fn angular_derivative(&self, axis: Axis) -> Result<Self> {
        match axis {
            Axis::Psi => self.psi_derivative(),
            Axis::Theta => self.theta_derivative(),
        }
    }

    fn psi_derivative(&self) -> Result<Self> {
        let n = self.grid.n_psi;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut out = Vec::with_capacity(self.values.len());
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for row in self.values.chunks(n) {
            for (b, &v) in buf.iter_mut().zip(row) {
                *b = Complex::new(v, 0.0);
            }
            fwd.process(&mut buf);
            for (k, b) in buf.iter_mut().enumerate() {
                let wave = if k < n / 2 {
                    k as f64
                } else if k == n / 2 {
                    0.0
                } else {
                    k as f64 - n as f64
                };
                *b *= Complex::new(0.0, wave);
            }
            inv.process(&mut buf);
            out.extend(buf.iter().map(|c| c.re / n as f64));
        }
        Self::new(&self.grid, out)
    }

    fn theta_derivative(&self) -> Result<Self> {
        let g = &self.grid;
        let n = g.n_psi;
        let mut out = vec![0.0; self.values.len()];
        for (i, (start, w)) in g.theta_stencils.iter().enumerate() {
            for j in 0..n {
                out[i * n + j] = w
                    .iter()
                    .enumerate()
                    .map(|(s, wk)| wk * self.values[(start + s) * n + j])
                    .sum();
            }
        }
        Self::new(&self.grid, out)
    }
}

/// The direction functions `n^0 = 1, n^1 = sinθ cosψ, n^2 = sinθ sinψ, n^3 = cosθ`.
pub fn direction(nu: usize, theta: f64, psi: f64) -> f64 {
    match nu {
        0 => 1.0,
        1 => theta.sin() * psi.cos(),
        2 => theta.sin() * psi.sin(),
        3 => theta.cos(),
        _ => f64::NAN,
    }
}

/// `n^ν` sampled as fields.
pub struct DirectionFunctions {
    pub n: [SphereField; 4],
}

impl DirectionFunctions {
    pub fn new(grid: &Arc<SphereGrid>) -> Self {
        let n = std::array::from_fn(|nu| {
            SphereField::from_fn(grid, |t, p| direction(nu, t, p))
                .expect("direction functions are finite")
        });
        DirectionFunctions { n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(SphereGrid::new(1, 8), Err(Error::Config(_))));
        assert!(matches!(SphereGrid::new(4, 2), Err(Error::Config(_))));
        assert!(matches!(SphereGrid::new(4, 7), Err(Error::Config(_))));
    }

    #[test]
    fn smallest_grid() {
        let g = SphereGrid::new(2, 4).unwrap();
        assert_eq!(g.len(), 8);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
    }

    #[test]
    fn poles_not_sampled() {
        for n in [2, 3, 7, 48, 101] {
            let g = SphereGrid::new(n, 8).unwrap();
            assert!(g.thetas().iter().all(|&t| t > 0.0 && t < PI));
            assert!(g.thetas().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn integrals_of_simple_fields() {
        let g = SphereGrid::new(8, 16).unwrap();
        let one = SphereField::from_fn(&g, |_, _| 1.0).unwrap();
        assert!((one.integrate() - 4.0 * PI).abs() < 1e-12);
        let cos2 = SphereField::from_fn(&g, |t, _| t.cos().powi(2)).unwrap();
        assert!((cos2.integrate() - 4.0 * PI / 3.0).abs() < 1e-12);
        let odd = SphereField::from_fn(&g, |t, _| t.cos()).unwrap();
        assert!(odd.integrate().abs() < 1e-14);
        // ∫ sin^4 θ dS = 2π · 16/15
        let s4 = SphereField::from_fn(&g, |t, _| t.sin().powi(4)).unwrap();
        assert!((s4.integrate() / (4.0 * PI) - 8.0 / 15.0).abs() < 1e-13);
    }

    #[test]
    fn multipole_projections() {
        let g = SphereGrid::new(8, 16).unwrap();
        let one = SphereField::from_fn(&g, |_, _| 1.0).unwrap();
        assert!((one.project_multipole(0).unwrap() - 1.0).abs() < 1e-14);
        let c = SphereField::from_fn(&g, |t, _| t.cos()).unwrap();
        assert!((c.project_multipole(3).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(c.project_multipole(1).unwrap().abs() < 1e-15);
        assert!(matches!(c.project_multipole(4), Err(Error::Usage(_))));
    }

    #[test]
    fn psi_derivative_is_spectral() {
        let g = SphereGrid::new(6, 16).unwrap();
        let f = SphereField::from_fn(&g, |_, p| p.sin()).unwrap();
        let df = f.angular_derivative(Axis::Psi).unwrap();
        for (k, v) in df.values().iter().enumerate() {
            let (_, p) = g.node(k);
            assert!((v - p.cos()).abs() < 1e-12);
        }
        for m in 0..8 {
            let f = SphereField::from_fn(&g, |t, p| t.sin() * (m as f64 * p).cos()).unwrap();
            let df = f.angular_derivative(Axis::Psi).unwrap();
            for (k, v) in df.values().iter().enumerate() {
                let (t, p) = g.node(k);
                assert!((v + m as f64 * t.sin() * (m as f64 * p).sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theta_derivative_is_accurate() {
        let g = SphereGrid::new(32, 64).unwrap();
        let f = SphereField::from_fn(&g, |t, _| t.cos()).unwrap();
        let df = f.angular_derivative(Axis::Theta).unwrap();
        for (k, v) in df.values().iter().enumerate() {
            let (t, _) = g.node(k);
            assert!((v + t.sin()).abs() < 1e-8, "θ={t}: {v} vs {}", -t.sin());
        }
        let c = SphereField::from_fn(&g, |_, _| 3.5).unwrap();
        for axis in [Axis::Theta, Axis::Psi] {
            assert!(c.angular_derivative(axis).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn nonfinite_samples_rejected() {
        let g = SphereGrid::new(4, 8).unwrap();
        assert!(matches!(
            SphereField::from_fn(&g, |t, _| 1.0 / (t - t)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn direction_functions_are_unit() {
        let g = SphereGrid::new(12, 24).unwrap();
        let d = DirectionFunctions::new(&g);
        for k in 0..g.len() {
            let s: f64 = (1..4).map(|i| d.n[i].values()[k].powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
