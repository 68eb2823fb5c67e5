//! Bondi energy-momentum, news flux and mass loss.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use super::expansion::{AngularField, BondiExpansion};
use crate::dual::{seed, Dual};
use crate::error::{Error, Result};
use crate::sphere::{Axis, SphereField, SphereGrid};

/// `l, l̄, p, p̄` sampled on a grid.
#[derive(Debug, Clone)]
pub struct DerivedFields {
    pub l: SphereField,
    pub l_bar: SphereField,
    pub p: SphereField,
    pub p_bar: SphereField,
}

fn pole_checked(grid: &Arc<SphereGrid>, values: Vec<f64>, name: &str) -> Result<SphereField> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        let (t, p) = grid.node(k);
        return Err(Error::PoleRegularity(format!(
            "{name} is not finite at θ = {t}, ψ = {p}"
        )));
    }
    SphereField::new(grid, values)
}

/// Derived fields from closed-form angular derivatives.
pub fn derived_fields(
    exp: &BondiExpansion,
    u: f64,
    grid: &Arc<SphereGrid>,
) -> Result<DerivedFields> {
    let vals: Vec<_> = grid.nodes().map(|(t, p)| exp.derived(u, t, p)).collect();
    Ok(DerivedFields {
        l: pole_checked(grid, vals.iter().map(|d| d.l).collect(), "l")?,
        l_bar: pole_checked(grid, vals.iter().map(|d| d.l_bar).collect(), "l̄")?,
        p: pole_checked(grid, vals.iter().map(|d| d.p).collect(), "p")?,
        p_bar: pole_checked(grid, vals.iter().map(|d| d.p_bar).collect(), "p̄")?,
    })
}

/// Derived fields from grid samples of `c, d, N, P` and grid angular derivatives.
pub fn derived_fields_from_samples(
    c: &SphereField,
    d: &SphereField,
    n: &SphereField,
    p: &SphereField,
) -> Result<DerivedFields> {
    let grid = c.grid().clone();
    let (c2, c3) = (
        c.angular_derivative(Axis::Theta)?,
        c.angular_derivative(Axis::Psi)?,
    );
    let (d2, d3) = (
        d.angular_derivative(Axis::Theta)?,
        d.angular_derivative(Axis::Psi)?,
    );
    let len = grid.len();
    let mut out = [
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
    ];
    for k in 0..len {
        let (t, _) = grid.node(k);
        let cot = t.cos() / t.sin();
        let csc = 1.0 / t.sin();
        let (cv, dv) = (c.values()[k], d.values()[k]);
        let (c2, c3, d2, d3) = (
            c2.values()[k],
            c3.values()[k],
            d2.values()[k],
            d3.values()[k],
        );
        out[0][k] = c2 + 2.0 * cv * cot + d3 * csc;
        out[1][k] = d2 + 2.0 * dv * cot - c3 * csc;
        out[2][k] =
            2.0 * n.values()[k] + 3.0 * (cv * c2 + dv * d2) + 4.0 * (cv * cv + dv * dv) * cot
                - 2.0 * (c3 * dv - cv * d3) * csc;
        out[3][k] =
            2.0 * p.values()[k] + 2.0 * (c2 * dv - cv * d2) + 3.0 * (cv * c3 + dv * d3) * csc;
    }
    let [l, lb, pp, pb] = out;
    Ok(DerivedFields {
        l: pole_checked(&grid, l, "l")?,
        l_bar: pole_checked(&grid, lb, "l̄")?,
        p: pole_checked(&grid, pp, "p")?,
        p_bar: pole_checked(&grid, pb, "p̄")?,
    })
}

/// Sample a coefficient function at fixed `u`.
pub fn sample(f: &AngularField, u: f64, grid: &Arc<SphereGrid>) -> Result<SphereField> {
    SphereField::from_fn(grid, |t, p| f.eval(u, t, p))
}

/// `m_ν = (1/4π) ∫ M n^ν dS`.
pub fn bondi_energy_momentum(mass_aspect: &SphereField) -> Result<[f64; 4]> {
    let mut m = [0.0; 4];
    for (nu, v) in m.iter_mut().enumerate() {
        *v = mass_aspect.project_multipole(nu)?;
    }
    Ok(m)
}

/// `F_ν = (1/4π) ∫ ((c_,0)² + (d_,0)²) n^ν dS`.
pub fn news_flux(exp: &BondiExpansion, u: f64, grid: &Arc<SphereGrid>) -> Result<[f64; 4]> {
    let ud = seed([u])[0];
    let dens = SphereField::from_fn(grid, |t, p| {
        let c: Dual<f64, 1> = exp.c.eval(ud, Dual::constant(t), Dual::constant(p));
        let d: Dual<f64, 1> = exp.d.eval(ud, Dual::constant(t), Dual::constant(p));
        c.d[0] * c.d[0] + d.d[0] * d.d[0]
    })?;
    let mut f = [0.0; 4];
    for (nu, v) in f.iter_mut().enumerate() {
        *v = dens.project_multipole(nu)?;
    }
    Ok(f)
}

/// `|m| = √(m_1² + m_2² + m_3²)`.
pub fn spatial_norm(m: &[f64; 4]) -> f64 {
    (m[1] * m[1] + m[2] * m[2] + m[3] * m[3]).sqrt()
}

/// Sampled evolution of `m_ν(u)` under `dm_ν/du = −F_ν`.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub u: Vec<f64>,
    pub m: Vec<[f64; 4]>,
    pub flux: Vec<[f64; 4]>,
    /// `m_0 − |m|`.
    pub margin: Vec<f64>,
    /// Discrete `d/du (m_0 − |m|)`: forward differences, the last sample repeating its predecessor.
    pub dmargin_du: Vec<f64>,
}

/// Integrate `dm_ν/du = −F_ν` from `u_start` to `u_end` (either direction)
/// by composite Simpson with one midpoint flux per step.
pub fn evolve_energy_momentum(
    m_start: [f64; 4],
    exp: &BondiExpansion,
    u_start: f64,
    u_end: f64,
    step: f64,
    grid: &Arc<SphereGrid>,
) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Usage(format!(
            "retarded-time step must be positive, got {step}"
        )));
    }
    if !(u_start.is_finite() && u_end.is_finite()) || u_start == u_end {
        return Err(Error::Usage("empty retarded-time range".into()));
    }
    let span = u_end - u_start;
    let n = (span.abs() / step - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let at = |k: usize| {
        if k == n {
            u_end
        } else {
            u_start + h * k as f64
        }
    };
    let mut u = vec![u_start];
    let mut m = vec![m_start];
    let mut flux = vec![news_flux(exp, u_start, grid)?];
    for k in 0..n {
        let (u0, u1) = (at(k), at(k + 1));
        let fm = news_flux(exp, 0.5 * (u0 + u1), grid)?;
        let f1 = news_flux(exp, u1, grid)?;
        let f0 = flux[k];
        let prev = m[k];
        let next: [f64; 4] =
            std::array::from_fn(|nu| prev[nu] - (u1 - u0) / 6.0 * (f0[nu] + 4.0 * fm[nu] + f1[nu]));
        u.push(u1);
        m.push(next);
        flux.push(f1);
    }
    let margin: Vec<f64> = m.iter().map(|q| q[0] - spatial_norm(q)).collect();
    let mut dmargin_du: Vec<f64> = (0..n)
        .map(|k| (margin[k + 1] - margin[k]) / (u[k + 1] - u[k]))
        .collect();
    dmargin_du.push(*dmargin_du.last().expect("at least one step"));
    Ok(Trajectory {
        u,
        m,
        flux,
        margin,
        dmargin_du,
    })
}

impl Trajectory {
    pub const CSV_HEADER: &'static str = "u,m0,m1,m2,m3,F0,F1,F2,F3,margin,dmargin_du";

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for k in 0..self.len() {
            let [m0, m1, m2, m3] = self.m[k];
            let [f0, f1, f2, f3] = self.flux[k];
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.u[k], m0, m1, m2, m3, f0, f1, f2, f3, self.margin[k], self.dmargin_du[k]
            )?;
        }
        Ok(())
    }
}

/// Worst-case rates of `m_0 − |m|` along a trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MassLossMargin {
    /// Largest discrete derivative of `m_0 − |m|`.
    pub max_discrete: f64,
    /// Largest `−F_0 + Σ m_i F_i / |m|` (or `−F_0` where `|m| = 0`).
    pub max_analytic: f64,
    /// Largest `√(F_1² + F_2² + F_3²) − F_0`; nonpositive when the flux chain holds.
    pub max_holder_excess: f64,
    /// Samples where `|m| = 0` and the plain mass-loss rate was used.
    pub degenerate_samples: usize,
}

pub fn mass_loss_margin(traj: &Trajectory) -> Result<MassLossMargin> {
    if traj.len() < 2 {
        return Err(Error::Precondition(
            "trajectory needs at least two samples".into(),
        ));
    }
    let mut out = MassLossMargin {
        max_discrete: traj
            .dmargin_du
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        max_analytic: f64::NEG_INFINITY,
        max_holder_excess: f64::NEG_INFINITY,
        degenerate_samples: 0,
    };
    for (m, f) in traj.m.iter().zip(&traj.flux) {
        let norm = spatial_norm(m);
        let rate = if norm > 0.0 {
            -f[0] + (m[1] * f[1] + m[2] * f[2] + m[3] * f[3]) / norm
        } else {
            out.degenerate_samples += 1;
            -f[0]
        };
        out.max_analytic = out.max_analytic.max(rate);
        out.max_holder_excess = out.max_holder_excess.max(spatial_norm(f) - f[0]);
    }
    Ok(out)
}

/// Outcome of a regularity condition check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Where the largest violation occurred: `(u, θ)`.
    pub worst: (f64, f64),
}

/// Periodicity in `ψ` of `β, γ, δ, U, V, W` and their derivatives up to
/// second order, compared at `ψ = 0` and `ψ = 2π`.
pub fn condition_a(exp: &BondiExpansion, u_samples: &[f64], radius: f64) -> ConditionReport {
    const TOL: f64 = 1e-10;
    let mut rep = ConditionReport {
        max_violation: 0.0,
        tolerance: TOL,
        passed: true,
        worst: (f64::NAN, f64::NAN),
    };
    let jets = |u: f64, t: f64, ps: f64| {
        let x: [Dual<Dual<f64, 4>, 4>; 4] = seed(seed([u, radius, t, ps]));
        let f = exp.functions(x[0], x[1], x[2], x[3]);
        [f.beta, f.gamma, f.delta, f.u, f.v, f.w]
    };
    for &u in u_samples {
        for k in 1..12 {
            let t = PI * k as f64 / 12.0;
            let (a, b) = (jets(u, t, 0.0), jets(u, t, 2.0 * PI));
            for (fa, fb) in a.iter().zip(&b) {
                let mut diff = (fa.v.v - fb.v.v).abs();
                for i in 0..4 {
                    diff = diff.max((fa.v.d[i] - fb.v.d[i]).abs());
                    for j in 0..4 {
                        diff = diff.max((fa.d[i].d[j] - fb.d[i].d[j]).abs());
                    }
                }
                if diff > rep.max_violation {
                    rep.max_violation = diff;
                    rep.worst = (u, t);
                }
            }
        }
    }
    rep.passed = rep.max_violation <= TOL;
    rep
}

/// `∫₀^{2π} c(u, θ, ψ) dψ` by the trapezoid rule (exact for the trigonometric modes used).
pub fn ring_integral(c: &AngularField, u: f64, theta: f64) -> f64 {
    const N: usize = 128;
    let h = 2.0 * PI / N as f64;
    crate::sphere::compensated_sum((0..N).map(|k| c.eval(u, theta, h * k as f64) * h))
}

/// Pole limit of the ring integral, extrapolated in `ε²` from rings at `ε = θ` or `π − θ`.
pub fn pole_ring_limit(c: &AngularField, u: f64, north: bool) -> f64 {
    let eps = [0.01, 0.02, 0.04];
    let vals: Vec<f64> = eps
        .iter()
        .map(|&e| ring_integral(c, u, if north { e } else { PI - e }))
        .collect();
    // quadratic in e² through three points, evaluated at 0
    let x: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= (0.0 - x[j]) / (x[i] - x[j]);
            }
        }
        acc += w * vals[i];
    }
    acc
}

/// `∫₀^{2π} c(u, θ₀, ψ) dψ = 0` at both poles for every sampled `u`.
pub fn condition_b(c: &AngularField, u_samples: &[f64]) -> ConditionReport {
    const TOL: f64 = 1e-8;
    let mut rep = ConditionReport {
        max_violation: 0.0,
        tolerance: TOL,
        passed: true,
        worst: (f64::NAN, f64::NAN),
    };
    for &u in u_samples {
        for (north, t0) in [(true, 0.0), (false, PI)] {
            let v = pole_ring_limit(c, u, north).abs();
            if v > rep.max_violation {
                rep.max_violation = v;
                rep.worst = (u, t0);
            }
        }
    }
    rep.passed = rep.max_violation <= TOL;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<SphereGrid> {
        SphereGrid::new(24, 48).unwrap()
    }

    #[test]
    fn energy_momentum_of_dipolar_aspect() {
        let m = 1.7;
        let f = SphereField::from_fn(&grid(), |t, _| m * (1.0 + 0.5 * t.cos())).unwrap();
        let e = bondi_energy_momentum(&f).unwrap();
        assert!((e[0] - m).abs() < 1e-13 && (e[3] - m / 6.0).abs() < 1e-13);
        assert!(e[1].abs() < 1e-14 && e[2].abs() < 1e-14);
        let z = bondi_energy_momentum(&SphereField::from_fn(&grid(), |_, _| 0.0).unwrap()).unwrap();
        assert_eq!(z, [0.0; 4]);
    }

    #[test]
    fn quadrupole_flux() {
        let a = 0.3;
        let e = BondiExpansion {
            c: AngularField::monomial(vec![0.0, a], 2, 0, 0),
            ..Default::default()
        };
        let f = news_flux(&e, 2.0, &grid()).unwrap();
        assert!((f[0] - 8.0 * a * a / 15.0).abs() < 1e-14);
        assert!(f[1].abs() < 1e-15 && f[2].abs() < 1e-15 && f[3].abs() < 1e-15);
        let swapped = BondiExpansion {
            d: e.c.clone(),
            ..Default::default()
        };
        assert_eq!(news_flux(&swapped, 2.0, &grid()).unwrap(), f);
    }

    #[test]
    fn evolution_directions_and_errors() {
        let e = BondiExpansion {
            c: AngularField::monomial(vec![0.0, 0.1], 2, 0, 0),
            ..Default::default()
        };
        let g = grid();
        let fwd = evolve_energy_momentum([1.0, 0.0, 0.0, 0.0], &e, 0.0, 1.0, 0.25, &g).unwrap();
        assert_eq!(fwd.len(), 5);
        assert!((fwd.m[4][0] - (1.0 - 0.08 / 15.0)).abs() < 1e-14);
        let back = evolve_energy_momentum(fwd.m[4], &e, 1.0, 0.0, 0.25, &g).unwrap();
        assert!((back.m[4][0] - 1.0).abs() < 1e-14);
        assert!(evolve_energy_momentum([0.0; 4], &e, 0.0, 1.0, 0.0, &g).is_err());
        assert!(evolve_energy_momentum([0.0; 4], &e, 1.0, 1.0, 0.1, &g).is_err());
        let z = evolve_energy_momentum([0.0; 4], &BondiExpansion::default(), 0.0, 1.0, 0.5, &g)
            .unwrap();
        let mm = mass_loss_margin(&z).unwrap();
        assert_eq!((mm.max_discrete, mm.max_analytic), (0.0, 0.0));
        assert_eq!(mm.degenerate_samples, 3);
    }

    #[test]
    fn csv_layout() {
        let z = evolve_energy_momentum(
            [1.0, 0.0, 0.0, 0.0],
            &BondiExpansion::default(),
            0.0,
            1.0,
            0.5,
            &grid(),
        )
        .unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], Trajectory::CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[1].starts_with("0.00000000000000000e0,1.00000000000000000e0"));
    }

    #[test]
    fn conditions() {
        let good = BondiExpansion {
            c: AngularField::monomial(vec![0.0, 0.1], 2, 0, 1),
            d: AngularField::monomial(vec![0.2], 2, 1, -2),
            ..Default::default()
        };
        assert!(condition_a(&good, &[0.0, 1.0], 20.0).passed);
        assert!(condition_b(&good.c, &[0.0, 1.0]).passed);
        // Y_20 does not vanish at the poles: 2π Y_20(0)
        let y20 = AngularField::harmonic(2, 0, vec![1.0]).unwrap();
        let rep = condition_b(&y20, &[0.0]);
        assert!(!rep.passed);
        let oracle = 2.0 * PI * (5.0 / (4.0 * PI)).sqrt();
        assert!((rep.max_violation - oracle).abs() < 1e-9);
    }

    #[test]
    fn derived_paths_agree() {
        let e = BondiExpansion {
            c: AngularField::monomial(vec![0.3], 2, 1, 1),
            d: AngularField::monomial(vec![0.2], 2, 0, -2),
            n: AngularField::monomial(vec![0.1], 1, 0, 1),
            p: AngularField::monomial(vec![0.05], 1, 1, 0),
            ..Default::default()
        };
        let g = SphereGrid::new(40, 32).unwrap();
        let a = derived_fields(&e, 0.0, &g).unwrap();
        let s = |f: &AngularField| sample(f, 0.0, &g).unwrap();
        let b = derived_fields_from_samples(&s(&e.c), &s(&e.d), &s(&e.n), &s(&e.p)).unwrap();
        for (x, y) in [
            (&a.l, &b.l),
            (&a.l_bar, &b.l_bar),
            (&a.p, &b.p),
            (&a.p_bar, &b.p_bar),
        ] {
            let diff = x.zip_with(y, |p, q| p - q).unwrap().max_abs();
            assert!(diff < 1e-6, "{diff}");
        }
    }
}
