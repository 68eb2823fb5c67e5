//! Closed-form induced data on asymptotically null slices of a Bondi metric.

use std::sync::Arc;

use serde::Serialize;

use super::expansion::BondiExpansion;
use crate::dec::sample_nodes;
use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::fit::{decay_exponent, DecayFit};
use crate::geometry::{Frame, InitialData, Pullback};
use crate::linalg::Mat3;
use crate::spacetimes::{BondiMetric, BondiSlice, SliceSpec};
use crate::sphere::SphereGrid;

/// The truncated expansions of `g_ij` and `h_ij` in the frame `ĕ_i`,
/// through order `r⁻³`, with every coefficient evaluated at `u = u₀`.
pub fn induced_expansion<S: Scalar>(
    exp: &BondiExpansion,
    spec: &SliceSpec,
    x: &[S; 3],
) -> (Mat3<S>, Mat3<S>) {
    let (r, th, ps) = (x[0], x[1], x[2]);
    let u = S::cst(spec.u0);
    let cj = exp.c.jet2(u, th, ps);
    let dj = exp.d.jet2(u, th, ps);
    let (c, c0, c2, c3) = (cj.v, cj.d[0], cj.d[1], cj.d[2]);
    let (c00, c02, c03, c22, c33) = (
        cj.dd[0][0],
        cj.dd[0][1],
        cj.dd[0][2],
        cj.dd[1][1],
        cj.dd[2][2],
    );
    let (d, d0, d2, d3) = (dj.v, dj.d[0], dj.d[1], dj.d[2]);
    let (d00, d02, d03, d22, d23, d33) = (
        dj.dd[0][0],
        dj.dd[0][1],
        dj.dd[0][2],
        dj.dd[1][1],
        dj.dd[1][2],
        dj.dd[2][2],
    );
    let big_m = exp.mass.eval(u, th, ps);
    let big_n = exp.n.eval(u, th, ps);
    let big_p = exp.p.eval(u, th, ps);
    let big_c = exp.big_c.eval(u, th, ps);
    let big_h = exp.big_h.eval(u, th, ps);
    let a3 = spec.a3.eval(S::zero(), th, ps);

    let (s, co) = (th.sin(), th.cos());
    let cot = co / s;
    let csc = s.recip();
    let l = c2 + c * cot * 2.0 + d3 * csc;
    let lb = d2 + d * cot * 2.0 - c3 * csc;
    let l0 = c02 + c0 * cot * 2.0 + d03 * csc;
    let lb0 = d02 + d0 * cot * 2.0 - c03 * csc;
    let l2 = c22 + c2 * cot * 2.0 - c * csc.sq() * 2.0 + d23 * csc - d3 * csc * cot;
    let lb3 = d23 + d3 * cot * 2.0 - c33 * csc;

    let ir = r.recip();
    let ir2 = ir.sq();
    let ir3 = ir2 * ir;
    let q = c.sq() + d.sq();
    let cc0 = c * c0 + d * d0;
    let cc2 = c * c2 + d * d2;
    let cc3 = c * c3 + d * d3;
    let cubic = c * q;
    let one = S::one();

    let mut g = [[S::zero(); 3]; 3];
    g[0][0] = one + (a3 * 16.0 + big_m - cc0) * ir3 * 0.5;
    g[0][1] = -l * ir2 * 0.5 + (big_n * 12.0 - l0 * 3.0 + cc2 * 4.0) * ir3 / 12.0;
    g[0][2] = -lb * ir2 * 0.5 + (big_p * 12.0 - lb0 * 3.0 + cc3 * csc * 4.0) * ir3 / 12.0;
    g[1][1] = one
        + c * ir * 2.0
        + (q * 2.0 + c0) * ir2
        + (cubic + big_c * 2.0 + cc0 * 2.0 + c00 * 0.25) * ir3;
    g[1][2] = d * ir * 2.0 + d0 * ir2 + (d * q + big_h * 2.0 + d00 * 0.25) * ir3;
    g[2][2] = one - c * ir * 2.0
        + (q * 2.0 - c0) * ir2
        + (-cubic - big_c * 2.0 + cc0 * 2.0 - c00 * 0.25) * ir3;

    let mut h = [[S::zero(); 3]; 3];
    h[0][0] = one + q * ir2 + (a3 * 16.0 - big_m) * ir3;
    h[0][1] = l * ir2 * 0.5
        + (l0 * 0.5 - q * cot * 2.0 - big_n * 4.0 + (c3 * d - c * d3) * csc * H12_CROSS
            - cc2 * (13.0 / 3.0))
            * ir3
            * 0.5;
    h[0][2] = lb * ir2 * 0.5
        + (lb0 * 0.5 + c * d2 - c2 * d - big_p * 4.0 - cc3 * csc * (13.0 / 3.0)) * ir3 * 0.5;
    h[1][1] = one
        + c * ir
        + c0 * ir2
        + (big_m * 3.0 - a3 * 16.0 - big_c * 4.0 - l2 * 2.0 - cubic * 2.0 + cc0 * 5.0 + c00 * 1.5)
            * ir3
            * 0.25;
    h[1][2] = d * ir
        + d0 * ir2
        + (-d * q * 2.0 + d * cot.sq() * 2.0 + d * csc.sq() * 2.0
            - c3 * cot * csc * 4.0
            - d33 * csc.sq()
            - d2 * cot
            - d22
            - big_h * 4.0
            + d00 * 1.5)
            * ir3
            * 0.25;
    h[2][2] = one - c * ir - c0 * ir2
        + (big_m * 3.0 - a3 * 16.0 + big_c * 4.0 + cubic * 2.0 + cc0 * 5.0
            - c00 * 1.5
            - l * cot * 2.0
            - lb3 * csc * 2.0)
            * ir3
            * 0.25;
    for i in 0..3 {
        for j in 0..i {
            g[i][j] = g[j][i];
            h[i][j] = h[j][i];
        }
    }
    (g, h)
}

/// Coefficient of `(c_,3 d − c d_,3) csc θ` in the `r⁻³` bracket of `h_12`.
const H12_CROSS: f64 = 1.0;

/// The truncated closed-form slice data as initial data in the frame `ĕ_i`.
#[derive(Debug, Clone, Serialize)]
pub struct InducedSliceData {
    pub expansion: BondiExpansion,
    pub spec: SliceSpec,
}

impl InitialData for InducedSliceData {
    fn frame(&self) -> Frame {
        Frame::hyperbolic()
    }
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(induced_expansion(&self.expansion, &self.spec, x).0)
    }
    fn second_form<S: Scalar>(&self, x: &[S; 3]) -> Result<Mat3<S>> {
        Ok(induced_expansion(&self.expansion, &self.spec, x).1)
    }
}

/// The exact induced data of a Bondi metric on the slice `spec`.
pub fn slice_pullback(
    exp: &BondiExpansion,
    spec: &SliceSpec,
    r_min: f64,
) -> Result<Pullback<BondiMetric, BondiSlice>> {
    Pullback::new(
        BondiMetric::with_r_min(exp.clone(), r_min),
        BondiSlice::new(spec.clone(), exp.clone()),
        Frame::hyperbolic(),
    )
}

/// Disagreement of one component between the pullback and the closed form.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentConsistency {
    pub name: String,
    /// Sup over the grid of the absolute difference, per radius.
    pub norms: Vec<f64>,
    pub fit: DecayFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub radii: Vec<f64>,
    pub components: Vec<ComponentConsistency>,
}

impl ConsistencyReport {
    /// Minimum fitted exponent over all components.
    pub fn min_exponent(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.fit.exponent())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Slice radii used by the consistency check when none are given.
pub const CONSISTENCY_RADII: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];

pub const COMPONENT_NAMES: [&str; 12] = [
    "g11", "g12", "g13", "g22", "g23", "g33", "h11", "h12", "h13", "h22", "h23", "h33",
];

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Compare the pulled-back data with the closed-form lists at each radius
/// and fit the decay of the differences.
pub fn expansion_consistency(
    exp: &BondiExpansion,
    spec: &SliceSpec,
    radii: &[f64],
    grid: &Arc<SphereGrid>,
) -> Result<ConsistencyReport> {
    if radii.len() < 4 {
        return Err(Error::Usage("decay fits need at least 4 radii".into()));
    }
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let exact = slice_pullback(exp, spec, r_min)?;
    let mut norms = vec![Vec::with_capacity(radii.len()); 12];
    for &r in radii {
        let per: Vec<[f64; 12]> = sample_nodes(grid, |t, p| {
            let x = [r, t, p];
            let ge = exact.metric::<f64>(&x)?;
            let he = exact.second_form::<f64>(&x)?;
            let (gc, hc) = induced_expansion(exp, spec, &x);
            let mut out = [0.0; 12];
            for (k, &(i, j)) in PAIRS.iter().enumerate() {
                out[k] = (ge[i][j] - gc[i][j]).abs();
                out[k + 6] = (he[i][j] - hc[i][j]).abs();
            }
            Ok(out)
        })?;
        for (k, n) in norms.iter_mut().enumerate() {
            n.push(per.iter().fold(0.0f64, |a, v| a.max(v[k])));
        }
    }
    let components = norms
        .into_iter()
        .zip(COMPONENT_NAMES)
        .map(|(n, name)| {
            Ok(ComponentConsistency {
                name: name.to_string(),
                fit: decay_exponent(radii, &n)?,
                norms: n,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConsistencyReport {
        radii: radii.to_vec(),
        components,
    })
}
