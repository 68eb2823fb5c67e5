//! Energy-momentum of asymptotically null initial data.
//!
//! Data are frame components in `ĕ_1 = √(1+r²) ∂_r`, `ĕ_2 = r⁻¹ ∂_θ`,
//! `ĕ_3 = (r sin θ)⁻¹ ∂_ψ`, compared against the hyperboloid model
//! `ğ = h̆ = δ` in that frame.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dd::Dd;
use crate::dec::{dec_survey, moments, sample_nodes, DecReport};
use crate::dual::{seed, Dual, Scalar};
use crate::error::{Error, Result};
use crate::fit::{decay_exponent, extrapolate, DecayFit, Extrapolation};
use crate::geometry::{Frame, InitialData};
use crate::linalg::Mat3;
use crate::sphere::SphereGrid;

type T3<S> = [[[S; 3]; 3]; 3];

/// Minimum fitted decay order before charges are reported as limits.
pub const DECAY_GATE: f64 = 1.55;

/// Ladder used when none is given.
pub const DEFAULT_RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

/// The hyperbolic background `(ğ, h̆)` and its frame connection.
#[derive(Debug, Clone, Copy, Default)]
pub struct HyperbolicBackground;

impl HyperbolicBackground {
    /// `gamma[l][i][j] = Γ̆^l_ij` with `∇̆_{ĕ_i} ĕ_j = Γ̆^l_ij ĕ_l`.
    pub fn connection<S: Scalar>(r: S, theta: S) -> T3<S> {
        let k = (r.sq() + 1.0).sqrt() / r;
        let q = theta.cos() / (theta.sin() * r);
        let mut g = [[[S::zero(); 3]; 3]; 3];
        g[0][1][1] = -k;
        g[1][1][0] = k;
        g[0][2][2] = -k;
        g[1][2][2] = -q;
        g[2][2][0] = k;
        g[2][2][1] = q;
        g
    }

    /// `[ĕ_i, ĕ_j] = c_ij^k ĕ_k` in closed form.
    pub fn structure(r: f64, theta: f64) -> T3<f64> {
        let k = (1.0 + r * r).sqrt() / r;
        let q = theta.cos() / (theta.sin() * r);
        let mut c = [[[0.0; 3]; 3]; 3];
        c[0][1][1] = -k;
        c[1][0][1] = k;
        c[0][2][2] = -k;
        c[2][0][2] = k;
        c[1][2][2] = -q;
        c[2][1][2] = q;
        c
    }
}

/// Frame connection of `ğ` from central differences of the frame fields and
/// the Koszul formula for an orthonormal frame.
pub fn background_connection_fd(x: [f64; 3], step: f64) -> T3<f64> {
    let frame = Frame::hyperbolic();
    let e = frame.vectors(&x);
    // de[b][j][a] = ∂_b E_j^a
    let de: T3<f64> = std::array::from_fn(|b| {
        let mut xp = x;
        let mut xm = x;
        xp[b] += step;
        xm[b] -= step;
        let (ep, em) = (frame.vectors(&xp), frame.vectors(&xm));
        std::array::from_fn(|j| std::array::from_fn(|a| (ep[j][a] - em[j][a]) / (2.0 * step)))
    });
    let einv = crate::linalg::inv3(&e).expect("frame invertible off the axis");
    let c: T3<f64> = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let comm: [f64; 3] = std::array::from_fn(|a| {
                (0..3)
                    .map(|b| e[i][b] * de[b][j][a] - e[j][b] * de[b][i][a])
                    .sum()
            });
            std::array::from_fn(|k| (0..3).map(|a| comm[a] * einv[a][k]).sum())
        })
    });
    std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| 0.5 * (c[i][j][k] - c[j][k][i] + c[k][i][j]))
        })
    })
}

/// Which background connection enters the charge integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ConnectionSource {
    #[default]
    ClosedForm,
    /// Central-difference oracle (step `1e-5`).
    FiniteDifference,
}

impl ConnectionSource {
    fn at(self, x: &[f64; 3]) -> T3<f64> {
        match self {
            ConnectionSource::ClosedForm => HyperbolicBackground::connection(x[0], x[1]),
            ConnectionSource::FiniteDifference => background_connection_fd(*x, 1e-5),
        }
    }
}

/// `a = g − ğ`, `b = p − h̆` with frame derivatives `da[k][i][j] = ĕ_k(a_ij)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NullDeviation {
    pub g: Mat3<f64>,
    pub a: Mat3<f64>,
    pub da: T3<f64>,
    pub b: Mat3<f64>,
}

fn require_hyperbolic<D: InitialData>(data: &D) -> Result<()> {
    if data.frame() != Frame::hyperbolic() {
        return Err(Error::Usage(
            "null-infinity quantities need data in the unit hyperbolic frame".into(),
        ));
    }
    Ok(())
}

/// Deviation of the data from the hyperboloid model at a chart point.
///
/// `g` and `p` are evaluated in double-double arithmetic and the background
/// is subtracted before rounding, so `a` and `b` keep full relative accuracy
/// even where they are many orders of magnitude below one.
pub fn deviation<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<NullDeviation> {
    require_hyperbolic(data)?;
    let frame = Frame::hyperbolic();
    frame.check_point(x)?;
    let xt = x.map(Dd::from);
    let g1 = data.metric::<Dual<Dd, 3>>(&seed(xt))?;
    let p = data.second_form::<Dd>(&xt)?;
    let e = frame.vectors(&xt);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    Ok(NullDeviation {
        g: g1.map(|r| r.map(|v| v.v.value())),
        a: std::array::from_fn(|i| std::array::from_fn(|j| (g1[i][j].v - delta(i, j)).value())),
        da: std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..3)
                        .fold(Dd::from(0.0), |acc, a| acc + e[k][a] * g1[i][j].d[a])
                        .value()
                })
            })
        }),
        b: std::array::from_fn(|i| std::array::from_fn(|j| (p[i][j] - delta(i, j)).value())),
    })
}

/// `(ℰ, 𝒫_1, 𝒫_2, 𝒫_3)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeIntegrand {
    pub energy: f64,
    pub momentum: [f64; 3],
}

impl NullDeviation {
    /// `ℰ = ∇̆^j a_1j − ∇̆_1 tr a − (a_11 − g_11 tr a)`, `𝒫_k = b_k1 − g_k1 tr b`.
    pub fn integrand(&self, gamma: &T3<f64>) -> ChargeIntegrand {
        let a = &self.a;
        let nabla = |k: usize, i: usize, j: usize| {
            let mut v = self.da[k][i][j];
            for m in 0..3 {
                v -= gamma[m][k][i] * a[m][j] + gamma[m][k][j] * a[i][m];
            }
            v
        };
        let tra = a[0][0] + a[1][1] + a[2][2];
        let div: f64 = (0..3).map(|j| nabla(j, 0, j)).sum();
        let d1_tr = self.da[0][0][0] + self.da[0][1][1] + self.da[0][2][2];
        let energy = div - d1_tr - (a[0][0] - self.g[0][0] * tra);
        let trb = self.b[0][0] + self.b[1][1] + self.b[2][2];
        ChargeIntegrand {
            energy,
            momentum: std::array::from_fn(|k| self.b[k][0] - self.g[k][0] * trb),
        }
    }
}

pub fn charge_integrand<D: InitialData>(data: &D, x: &[f64; 3]) -> Result<ChargeIntegrand> {
    charge_integrand_with(data, x, ConnectionSource::ClosedForm)
}

pub fn charge_integrand_with<D: InitialData>(
    data: &D,
    x: &[f64; 3],
    source: ConnectionSource,
) -> Result<ChargeIntegrand> {
    Ok(deviation(data, x)?.integrand(&source.at(x)))
}

/// A single deviation component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    A(usize, usize),
    B(usize, usize),
}

/// Per-component decay of `a` and `b`, and the overall order `τ̂`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayOrders {
    pub radii: Vec<f64>,
    pub a: [[DecayFit; 3]; 3],
    pub b: [[DecayFit; 3]; 3],
    /// Smallest exponent over all components (`+∞` if all vanish).
    pub tau_hat: f64,
}

impl DecayOrders {
    pub fn get(&self, c: Component) -> &DecayFit {
        match c {
            Component::A(i, j) => &self.a[i][j],
            Component::B(i, j) => &self.b[i][j],
        }
    }
}

/// Sup-norm over the sphere of every deviation component, per radius.
fn deviation_sups<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<Vec<[[f64; 3]; 6]>> {
    radii
        .iter()
        .map(|&r| {
            let per = sample_nodes(grid, |t, p| deviation(data, &[r, t, p]))?;
            let mut sup = [[0.0f64; 3]; 6];
            for d in &per {
                for i in 0..3 {
                    for j in 0..3 {
                        sup[i][j] = sup[i][j].max(d.a[i][j].abs());
                        sup[3 + i][j] = sup[3 + i][j].max(d.b[i][j].abs());
                    }
                }
            }
            Ok(sup)
        })
        .collect()
}

/// The ladder extended by doubling its last rung until it spans a decade.
pub fn decay_ladder(radii: &[f64]) -> Vec<f64> {
    let mut out = radii.to_vec();
    if let (Some(&lo), Some(&hi)) = (out.first(), out.last()) {
        if lo > 0.0 && hi.is_finite() {
            let mut top = hi;
            while top < 10.0 * lo {
                top *= 2.0;
                out.push(top);
            }
        }
    }
    out
}

/// Log–log fits of every deviation component; needs at least four radii
/// spanning a decade.
pub fn estimate_decay_orders<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<DecayOrders> {
    if radii.len() < 4 {
        return Err(Error::Usage("decay fits need at least 4 radii".into()));
    }
    if radii[radii.len() - 1] < 10.0 * radii[0] {
        return Err(Error::Usage(format!(
            "decay fits need radii spanning a decade, got {}..{}",
            radii[0],
            radii[radii.len() - 1]
        )));
    }
    let sups = deviation_sups(data, radii, grid)?;
    let fit = |row: usize, j: usize| -> Result<DecayFit> {
        let n: Vec<f64> = sups.iter().map(|s| s[row][j]).collect();
        decay_exponent(radii, &n)
    };
    let mut a: [[DecayFit; 3]; 3] = Default::default();
    let mut b: [[DecayFit; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = fit(i, j)?;
            b[i][j] = fit(3 + i, j)?;
        }
    }
    let tau_hat = a
        .iter()
        .chain(b.iter())
        .flatten()
        .map(DecayFit::exponent)
        .fold(f64::INFINITY, f64::min);
    Ok(DecayOrders {
        radii: radii.to_vec(),
        a,
        b,
        tau_hat,
    })
}

/// Fitted decay order of one component; needs at least four radii.
pub fn estimate_decay_order<D: InitialData>(
    data: &D,
    component: Component,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<DecayFit> {
    Ok(estimate_decay_orders(data, radii, grid)?
        .get(component)
        .clone())
}

/// The 16 charges `E_ν`, `P_ν,k` with their extrapolation diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct NullCharges {
    pub energy: [Extrapolation; 4],
    /// `momentum[ν][k − 1]`.
    pub momentum: [[Extrapolation; 3]; 4],
    pub decay: DecayOrders,
}

impl NullCharges {
    pub fn e(&self, nu: usize) -> f64 {
        self.energy[nu].limit
    }

    pub fn p(&self, nu: usize, k: usize) -> f64 {
        self.momentum[nu][k - 1].limit
    }

    /// `E_ν − P_ν,1` for `ν = 0..3`.
    pub fn lorentz_margins(&self) -> [f64; 4] {
        std::array::from_fn(|nu| self.e(nu) - self.p(nu, 1))
    }

    pub fn max_abs(&self) -> f64 {
        self.energy
            .iter()
            .chain(self.momentum.iter().flatten())
            .fold(0.0f64, |m, x| m.max(x.limit.abs()))
    }

    pub fn divergence_warning(&self) -> bool {
        self.energy
            .iter()
            .chain(self.momentum.iter().flatten())
            .any(|x| x.divergence_warning)
    }
}

/// `(∫ℰ n^ν, ∫𝒫_k n^ν)` weighted by `r³/16π` and `r³/8π` on one sphere.
pub fn null_sphere_integrals<D: InitialData>(
    data: &D,
    r: f64,
    grid: &SphereGrid,
    source: ConnectionSource,
) -> Result<([f64; 4], [[f64; 3]; 4])> {
    let vals = sample_nodes(grid, |t, p| charge_integrand_with(data, &[r, t, p], source))?;
    let col = |f: &dyn Fn(&ChargeIntegrand) -> f64| {
        let v: Vec<f64> = vals.iter().map(f).collect();
        moments(grid, &v)
    };
    let r3 = r * r * r;
    let e = col(&|c| c.energy).map(|v| v * r3 / (16.0 * PI));
    let pk: [[f64; 4]; 3] =
        std::array::from_fn(|k| col(&|c| c.momentum[k]).map(|v| v * r3 / (8.0 * PI)));
    Ok((
        e,
        std::array::from_fn(|nu| std::array::from_fn(|k| pk[k][nu])),
    ))
}

/// Charges extrapolated over a radius ladder, after the decay-order gate
/// (fitted on the ladder extended to span a decade).
pub fn null_energy_momentum<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<NullCharges> {
    null_energy_momentum_with(data, radii, grid, ConnectionSource::ClosedForm)
}

pub fn null_energy_momentum_with<D: InitialData>(
    data: &D,
    radii: &[f64],
    grid: &SphereGrid,
    source: ConnectionSource,
) -> Result<NullCharges> {
    require_hyperbolic(data)?;
    let decay = estimate_decay_orders(data, &decay_ladder(radii), grid)?;
    if decay.tau_hat <= DECAY_GATE {
        return Err(Error::Precondition(format!(
            "fitted decay order {:.3} does not exceed {DECAY_GATE}; charges would not converge",
            decay.tau_hat
        )));
    }
    let per: Vec<_> = radii
        .iter()
        .map(|&r| null_sphere_integrals(data, r, grid, source))
        .collect::<Result<_>>()?;
    let ex = |f: &dyn Fn(&([f64; 4], [[f64; 3]; 4])) -> f64| {
        let s: Vec<f64> = per.iter().map(f).collect();
        extrapolate(radii, &s)
    };
    let mut energy = Vec::with_capacity(4);
    let mut momentum = Vec::with_capacity(4);
    for nu in 0..4 {
        energy.push(ex(&|q| q.0[nu])?);
        let row: Vec<Extrapolation> = (0..3).map(|k| ex(&|q| q.1[nu][k])).collect::<Result<_>>()?;
        momentum.push(<[Extrapolation; 3]>::try_from(row).expect("three components"));
    }
    Ok(NullCharges {
        energy: energy.try_into().expect("four components"),
        momentum: momentum.try_into().expect("four rows"),
        decay,
    })
}

/// `μ − max(|ϖ|, |ϖ + σ|)` over the sample points.
pub fn check_dec_null<D: InitialData>(data: &D, points: &[[f64; 3]]) -> Result<DecReport> {
    dec_survey(data, points)
}

/// `(E_0 − P_0,1) − √Σ_i (E_i − P_i,1)²`.
pub fn pmt_null_margin(margins: [f64; 4]) -> f64 {
    margins[0] - (margins[1].powi(2) + margins[2].powi(2) + margins[3].powi(2)).sqrt()
}

pub fn check_pmt_null(charges: &NullCharges) -> f64 {
    pmt_null_margin(charges.lorentz_margins())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frame_connection;
    use crate::synthetic::{ConformalHyperboloid, HyperboloidModel};

    #[test]
    fn closed_form_connection_matches_koszul() {
        for &x in &[[0.3, 0.4, 1.0], [2.0, 1.5, 4.0], [40.0, 2.9, 0.1]] {
            let k = frame_connection(&HyperboloidModel, &x).unwrap();
            let c = HyperbolicBackground::connection(x[0], x[1]);
            let s = HyperbolicBackground::structure(x[0], x[1]);
            for l in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((k.gamma[l][i][j] - c[l][i][j]).abs() < 1e-13);
                        assert!((k.structure[l][i][j] - s[l][i][j]).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn pmt_null_arithmetic() {
        assert_eq!(pmt_null_margin([0.0; 4]), 0.0);
        assert_eq!(pmt_null_margin([5.0, 3.0, 0.0, 0.0]), 2.0);
    }

    #[test]
    fn conformal_integrand_hand_formula() {
        // a = φ ğ: ℰ = −2 √(1+r²) φ' + 2φ + 3φ²
        let d = ConformalHyperboloid { k: 0.7, tau: 2.0 };
        for &r in &[1.5, 6.0, 30.0] {
            let phi = d.phi(r);
            let dphi = -2.0 * phi / r;
            let expect = -2.0 * (1.0 + r * r).sqrt() * dphi + 2.0 * phi + 3.0 * phi * phi;
            let got = charge_integrand(&d, &[r, 1.1, 0.4]).unwrap();
            assert!(
                (got.energy - expect).abs() < 1e-13 * expect.abs().max(1.0),
                "{r} {} {}",
                got.energy,
                expect
            );
            assert_eq!(got.momentum, [0.0; 3]);
        }
    }
}
