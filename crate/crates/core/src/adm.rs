//! Energy and linear momentum at spatial infinity.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dec::{dec_survey, moments, sample_nodes, DecReport};
use crate::dual::{seed, Dual};
use crate::error::{Error, Result};
use crate::fit::{decay_exponent, extrapolate, DecayFit, Extrapolation};
use crate::geometry::{chart_point, Frame, InitialData};
use crate::sphere::SphereGrid;

/// Total energy and momentum of a single asymptotically flat end.
#[derive(Debug, Clone, Serialize)]
pub struct AdmCharges {
    pub energy: Extrapolation,
    pub momentum: [Extrapolation; 3],
}

impl AdmCharges {
    pub fn e(&self) -> f64 {
        self.energy.limit
    }

    pub fn p(&self) -> [f64; 3] {
        self.momentum.each_ref().map(|m| m.limit)
    }

    pub fn divergence_warning(&self) -> bool {
        self.energy.divergence_warning || self.momentum.iter().any(|m| m.divergence_warning)
    }
}

fn require_cartesian<D: InitialData>(data: &D) -> Result<()> {
    if data.frame() != Frame::cartesian() {
        return Err(Error::Usage(
            "spatial-infinity charges need data in the unit Cartesian frame".into(),
        ));
    }
    Ok(())
}

/// Energy and momentum flux integrals on the coordinate sphere of radius `r`.
///
/// `∗dx^i` is oriented by the outward normal, so that `∗dx^i = n^i r² dΩ`.
pub fn adm_sphere_integrals<D: InitialData>(
    data: &D,
    r: f64,
    grid: &SphereGrid,
) -> Result<(f64, [f64; 3])> {
    require_cartesian(data)?;
    let vals: Vec<[f64; 4]> = sample_nodes(grid, |t, p| {
        let x = chart_point(Frame::cartesian(), r, t, p);
        let n = x.map(|c| c / r);
        let g1 = data.metric::<Dual<f64, 3>>(&seed(x))?;
        let h = data.second_form::<f64>(&x)?;
        let mut e = 0.0;
        for i in 0..3 {
            let mut flux = 0.0;
            for j in 0..3 {
                flux += g1[i][j].d[j] - g1[j][j].d[i];
            }
            e += flux * n[i];
        }
        let trh = h[0][0] + h[1][1] + h[2][2];
        let mut out = [e, 0.0, 0.0, 0.0];
        for k in 0..3 {
            out[k + 1] = (0..3).map(|i| (h[k][i] - g1[k][i].v * trh) * n[i]).sum();
        }
        Ok(out)
    })?;
    let column = |c: usize| -> f64 {
        let v: Vec<f64> = vals.iter().map(|q| q[c]).collect();
        moments(grid, &v)[0] * r * r
    };
    let e = column(0) / (16.0 * PI);
    let p = [1, 2, 3].map(|c| column(c) / (8.0 * PI));
    Ok((e, p))
}

/// Per-radius flux integrals extrapolated to `r → ∞`.
pub fn adm_energy_momentum<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<AdmCharges> {
    require_cartesian(data)?;
    let per: Vec<(f64, [f64; 3])> = radii
        .iter()
        .map(|&r| adm_sphere_integrals(data, r, grid))
        .collect::<Result<_>>()?;
    let e: Vec<f64> = per.iter().map(|q| q.0).collect();
    let energy = extrapolate(radii, &e)?;
    let momentum = [0, 1, 2].map(|k| {
        let s: Vec<f64> = per.iter().map(|q| q.1[k]).collect();
        extrapolate(radii, &s)
    });
    let [m0, m1, m2] = momentum;
    Ok(AdmCharges {
        energy,
        momentum: [m0?, m1?, m2?],
    })
}

/// Fitted decay of `g − δ`, `∂g`, `∂∂g`, `h`, `∂h`.
#[derive(Debug, Clone, Serialize)]
pub struct AfDecay {
    pub radii: Vec<f64>,
    /// Sup-norms per quantity and radius.
    pub norms: [Vec<f64>; 5],
    pub fits: [DecayFit; 5],
    /// Any quantity decaying slower than required minus 0.3.
    pub flagged: [bool; 5],
}

impl AfDecay {
    pub const LABELS: [&'static str; 5] = ["g-delta", "dg", "ddg", "h", "dh"];
    pub const REQUIRED: [f64; 5] = [1.0, 2.0, 3.0, 2.0, 3.0];

    pub fn passed(&self) -> bool {
        !self.flagged.iter().any(|&f| f)
    }
}

/// Log–log decay fits of the asymptotic-flatness quantities.
pub fn check_af_decay<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<AfDecay> {
    require_cartesian(data)?;
    if radii.len() < 4 {
        return Err(Error::Usage("decay fits need at least 4 radii".into()));
    }
    let mut norms: [Vec<f64>; 5] = Default::default();
    for &r in radii {
        let per: Vec<[f64; 5]> = sample_nodes(grid, |t, p| {
            let x = chart_point(Frame::cartesian(), r, t, p);
            let g2 = data.metric::<Dual<Dual<f64, 3>, 3>>(&seed(seed(x)))?;
            let h1 = data.second_form::<Dual<f64, 3>>(&seed(x))?;
            let mut m = [0.0f64; 5];
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    m[0] = m[0].max((g2[i][j].v.v - delta).abs());
                    m[3] = m[3].max(h1[i][j].v.abs());
                    for a in 0..3 {
                        m[1] = m[1].max(g2[i][j].v.d[a].abs());
                        m[4] = m[4].max(h1[i][j].d[a].abs());
                        for b in 0..3 {
                            m[2] = m[2].max(g2[i][j].d[b].d[a].abs());
                        }
                    }
                }
            }
            Ok(m)
        })?;
        for (q, norm) in norms.iter_mut().enumerate() {
            norm.push(per.iter().fold(0.0f64, |a, m| a.max(m[q])));
        }
    }
    let fits: Vec<DecayFit> = norms
        .iter()
        .map(|n| decay_exponent(radii, n))
        .collect::<Result<_>>()?;
    let fits: [DecayFit; 5] = fits.try_into().expect("five fits");
    let flagged = std::array::from_fn(|q| fits[q].exponent() < AfDecay::REQUIRED[q] - 0.3);
    Ok(AfDecay {
        radii: radii.to_vec(),
        norms,
        fits,
        flagged,
    })
}

/// `½(R + (tr h)² − |h|²) − |∇^j h_ij − ∇_i tr h|` over the sample points.
pub fn check_dec_flat<D: InitialData>(data: &D, points: &[[f64; 3]]) -> Result<DecReport> {
    dec_survey(data, points)
}

/// `E − |P|`.
pub fn pmt_margin(energy: f64, momentum: [f64; 3]) -> f64 {
    energy - momentum.iter().map(|p| p * p).sum::<f64>().sqrt()
}

pub fn check_pmt_flat(charges: &AdmCharges) -> f64 {
    pmt_margin(charges.e(), charges.p())
}

/// ADM ladder used when none is given.
pub const DEFAULT_RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::BowenYork;

    #[test]
    fn pmt_arithmetic() {
        assert_eq!(pmt_margin(2.0, [1.0, 0.0, 0.0]), 1.0);
        assert_eq!(pmt_margin(0.0, [0.0; 3]), 0.0);
    }

    #[test]
    fn bowen_york_charges() {
        let grid = SphereGrid::new(16, 32).unwrap();
        let d = BowenYork {
            energy: 2.0,
            momentum: [1.0, -0.5, 0.25],
        };
        let c = adm_energy_momentum(&d, &DEFAULT_RADII, &grid).unwrap();
        // per-radius energy is E (1 + E/2r)³ exactly
        for (r, s) in c.energy.radii.iter().zip(&c.energy.samples) {
            assert!((s - 2.0 * (1.0 + 1.0 / r).powi(3)).abs() < 1e-12);
        }
        assert!((c.e() - 2.0).abs() < 2e-4, "{}", c.e());
        for (p, q) in c.p().iter().zip(d.momentum) {
            assert!((p - q).abs() < 1e-9, "{p} vs {q}");
        }
    }

    #[test]
    fn rejects_non_cartesian_data() {
        let grid = SphereGrid::new(4, 8).unwrap();
        let e = adm_energy_momentum(&crate::synthetic::HyperboloidModel, &DEFAULT_RADII, &grid);
        assert!(matches!(e, Err(Error::Usage(_))));
    }
}
