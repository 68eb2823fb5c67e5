//! Dominant-energy-condition surveys over sample lattices, and sphere sampling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{chart_point, ConstraintQuantities, Frame, InitialData, PointAnalysis};
use crate::sphere::{compensated_sum, direction, SphereGrid};

/// Evaluate `f(θ, ψ)` at every grid node, in parallel, in node order.
pub(crate) fn sample_nodes<T, F>(grid: &SphereGrid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> Result<T> + Sync,
{
    let nodes: Vec<(f64, f64)> = grid.nodes().collect();
    nodes.par_iter().map(|&(t, p)| f(t, p)).collect()
}

/// `∫ f n^ν dΩ` for `ν = 0..3` from node values.
pub(crate) fn moments(grid: &SphereGrid, values: &[f64]) -> [f64; 4] {
    let w = grid.weights();
    let nodes: Vec<(f64, f64)> = grid.nodes().collect();
    std::array::from_fn(|nu| {
        compensated_sum(
            values
                .iter()
                .zip(w)
                .zip(&nodes)
                .map(|((v, w), &(t, p))| v * w * direction(nu, t, p)),
        )
    })
}

/// Chart points on the coordinate spheres of the given radii.
pub fn shell_points(frame: Frame, radii: &[f64], grid: &SphereGrid) -> Vec<[f64; 3]> {
    radii
        .iter()
        .flat_map(|&r| grid.nodes().map(move |(t, p)| chart_point(frame, r, t, p)))
        .collect()
}

/// Summary of `μ − max(|ϖ|, |ϖ + σ|)` over sample points.
#[derive(Debug, Clone, Serialize)]
pub struct DecReport {
    pub samples: usize,
    pub min_margin: f64,
    pub max_abs_margin: f64,
    pub worst_point: [f64; 3],
    pub max_abs_mu: f64,
    pub max_varpi_norm: f64,
    pub max_sigma: f64,
    /// Largest `| |ϖ| − |ϖ+σ| |`: zero when `p` is symmetric.
    pub max_branch_gap: f64,
}

impl DecReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.min_margin >= -tolerance
    }
}

/// Constraint quantities and DEC margin at each point.
pub fn dec_survey<D: InitialData>(data: &D, points: &[[f64; 3]]) -> Result<DecReport> {
    let q: Vec<ConstraintQuantities> = points
        .par_iter()
        .map(|x| Ok(PointAnalysis::new(data, x)?.constraint_quantities()))
        .collect::<Result<_>>()?;
    let mut rep = DecReport {
        samples: points.len(),
        min_margin: f64::INFINITY,
        max_abs_margin: 0.0,
        worst_point: [f64::NAN; 3],
        max_abs_mu: 0.0,
        max_varpi_norm: 0.0,
        max_sigma: 0.0,
        max_branch_gap: 0.0,
    };
    for (c, x) in q.iter().zip(points) {
        let m = c.dec_margin();
        if m < rep.min_margin {
            rep.min_margin = m;
            rep.worst_point = *x;
        }
        rep.max_abs_margin = rep.max_abs_margin.max(m.abs());
        rep.max_abs_mu = rep.max_abs_mu.max(c.mu.abs());
        rep.max_varpi_norm = rep.max_varpi_norm.max(c.varpi_norm);
        rep.max_sigma = rep
            .max_sigma
            .max(c.sigma.iter().fold(0.0f64, |a, s| a.max(s.abs())));
        rep.max_branch_gap = rep
            .max_branch_gap
            .max((c.varpi_norm - c.varpi_plus_sigma_norm).abs());
    }
    Ok(rep)
}
