//! Named Bondi scenarios and the vanishing-news positivity scenario.

use std::sync::Arc;

use serde::Serialize;

use super::expansion::{AngularField, BondiExpansion};
use super::radiation::{
    bondi_energy_momentum, evolve_energy_momentum, mass_loss_margin, sample, MassLossMargin,
    Trajectory,
};
use super::slice::slice_pullback;
use crate::dec::shell_points;
use crate::error::{Error, Result};
use crate::geometry::{Frame, PointAnalysis};
use crate::null::{check_pmt_null, null_energy_momentum, NullCharges};
use crate::spacetimes::SliceSpec;
use crate::sphere::SphereGrid;

/// `c = α (u − u_n) sin²θ`, `d = 0`, `M = m`.
pub fn quadrupole(alpha: f64, u_null: f64, m: f64) -> BondiExpansion {
    BondiExpansion {
        c: AngularField::monomial(vec![-alpha * u_null, alpha], 2, 0, 0),
        mass: AngularField::constant(m),
        ..Default::default()
    }
}

/// Both polarizations, `ψ`-dependent news and every subleading coefficient switched on.
pub fn biaxial() -> BondiExpansion {
    BondiExpansion {
        c: AngularField::monomial(vec![0.3, 0.1], 2, 1, 1),
        d: AngularField::monomial(vec![0.3, -0.08, 0.02], 2, 0, -2),
        big_c: AngularField::monomial(vec![0.1], 2, 0, 1),
        big_h: AngularField::monomial(vec![-0.2], 2, 1, 0),
        mass: AngularField::constant(1.0).plus(AngularField::monomial(vec![0.1], 1, 0, 1)),
        n: AngularField::monomial(vec![0.15], 1, 1, 0),
        p: AngularField::monomial(vec![0.1], 1, 0, -1),
    }
}

/// Slice data accompanying [`biaxial`].
pub fn biaxial_slice() -> SliceSpec {
    SliceSpec {
        u0: 0.4,
        a3: AngularField::monomial(vec![0.2], 0, 1, 0),
        ..Default::default()
    }
}

/// News that vanishes at `u = u_null` with nonzero `c_,0, d_,0` there.
pub fn vanishing_news(u_null: f64, m: f64) -> BondiExpansion {
    BondiExpansion {
        c: AngularField::monomial(vec![-0.1 * u_null, 0.1], 2, 0, 0).plus(AngularField::monomial(
            vec![-0.05 * u_null, 0.05],
            2,
            1,
            1,
        )),
        d: AngularField::monomial(vec![-0.08 * u_null, 0.08], 2, 0, -2),
        mass: AngularField::constant(m),
        ..Default::default()
    }
}

/// Largest `|c|, |d|` over the grid at `u`, with the node where it occurs.
fn news_sup(exp: &BondiExpansion, u: f64, grid: &Arc<SphereGrid>) -> (f64, (f64, f64)) {
    grid.nodes()
        .map(|(t, p)| {
            (
                exp.c.eval(u, t, p).abs().max(exp.d.eval(u, t, p).abs()),
                (t, p),
            )
        })
        .fold(
            (0.0, (f64::NAN, f64::NAN)),
            |a, b| if b.0 > a.0 { b } else { a },
        )
}

/// Options for [`vanishing_news_scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioOptions {
    pub u_start: f64,
    pub step: f64,
    pub radii: Vec<f64>,
    /// Slice radii at which rigidity residuals are recorded.
    pub rigidity_radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub u0: f64,
    /// Bondi energy-momentum of the `u₀` slice.
    pub m_final: [f64; 4],
    pub trajectory: Trajectory,
    pub mass_loss: MassLossMargin,
    /// Smallest `m_0 − |m|` over the samples `u ≤ u₀`.
    pub min_margin: f64,
    pub null: NullCharges,
    pub null_pmt_margin: f64,
    /// `E_0 − P_0,1 − m_0(u₀)`; a diagnostic only.
    pub energy_mass_gap: f64,
    /// Largest rigidity residual over the sampled slice points.
    pub max_rigidity_residual: f64,
}

/// Evolve backwards from a slice where the news vanishes and compute the
/// null charges of that slice.
pub fn vanishing_news_scenario(
    exp: &BondiExpansion,
    u0: f64,
    opts: &ScenarioOptions,
    grid: &Arc<SphereGrid>,
) -> Result<ScenarioReport> {
    const NEWS_TOL: f64 = 1e-10;
    let (sup, (t, p)) = news_sup(exp, u0, grid);
    if sup > NEWS_TOL {
        return Err(Error::Precondition(format!(
            "news does not vanish at u0 = {u0}: |c| or |d| = {sup:e} at θ = {t}, ψ = {p}"
        )));
    }
    if opts.u_start >= u0 {
        return Err(Error::Usage(format!(
            "scenario start {} must precede u0 = {u0}",
            opts.u_start
        )));
    }
    let m_final = bondi_energy_momentum(&sample(&exp.mass, u0, grid)?)?;
    let norm = (m_final[1].powi(2) + m_final[2].powi(2) + m_final[3].powi(2)).sqrt();
    if m_final[0] < norm {
        return Err(Error::Precondition(format!(
            "final energy-momentum is not future causal: m0 = {} < |m| = {norm}",
            m_final[0]
        )));
    }
    let trajectory = evolve_energy_momentum(m_final, exp, u0, opts.u_start, opts.step, grid)?;
    let mass_loss = mass_loss_margin(&trajectory)?;
    let min_margin = trajectory
        .margin
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let spec = SliceSpec {
        u0,
        ..Default::default()
    };
    let r_min = opts
        .radii
        .iter()
        .chain(&opts.rigidity_radii)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let data = slice_pullback(exp, &spec, r_min)?;
    let null = null_energy_momentum(&data, &opts.radii, grid)?;
    let null_pmt_margin = check_pmt_null(&null);
    let energy_mass_gap = null.e(0) - null.p(0, 1) - m_final[0];
    let coarse = SphereGrid::new(6, 12)?;
    let points = shell_points(Frame::hyperbolic(), &opts.rigidity_radii, &coarse);
    let res: Vec<f64> = points
        .iter()
        .map(|x| Ok(PointAnalysis::new(&data, x)?.rigidity_residual().max()))
        .collect::<Result<_>>()?;
    Ok(ScenarioReport {
        u0,
        m_final,
        trajectory,
        mass_loss,
        min_margin,
        null,
        null_pmt_margin,
        energy_mass_gap,
        max_rigidity_residual: res.into_iter().fold(0.0, f64::max),
    })
}
