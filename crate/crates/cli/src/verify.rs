//! The built-in property battery run by `verify`.

use std::f64::consts::PI;
use std::time::Instant;

use charges_core::adm::{self, adm_energy_momentum, check_af_decay, check_pmt_flat};
use charges_core::bondi::radiation::{
    bondi_energy_momentum, condition_a, condition_b, evolve_energy_momentum, mass_loss_margin,
    spatial_norm,
};
use charges_core::bondi::scenario::{
    biaxial, biaxial_slice, quadrupole, vanishing_news, vanishing_news_scenario, ScenarioOptions,
};
use charges_core::bondi::slice::{expansion_consistency, slice_pullback, CONSISTENCY_RADII};
use charges_core::bondi::{AngularField, BondiExpansion};
use charges_core::dec::{dec_survey, shell_points};
use charges_core::dual::{seed, Dual};
use charges_core::geometry::{
    evaluate, frame_connection, Chart4, Frame, InitialData, PointAnalysis, Pullback,
    SpacetimeMetric,
};
use charges_core::null::{
    check_pmt_null, estimate_decay_orders, null_energy_momentum, Component, HyperbolicBackground,
};
use charges_core::spacetimes::{
    BondiMetric, Hyperboloid, Kerr, KerrParameters, Minkowski, PolarFromCartesianSlice,
    Schwarzschild, SliceSpec, StaticSlice,
};
use charges_core::sphere::{direction, SphereField, SphereGrid};
use charges_core::synthetic::{HyperboloidModel, PerturbedHyperboloid};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use crate::commands::Output;
use crate::error::Result;
use crate::report::{sci, Check, Relation};

const SEED: u64 = 0x5eed;
const PROBES: usize = 100;
const FD_STEP: f64 = 1e-5;

struct Battery {
    scale: f64,
    checks: Vec<Check>,
    errors: serde_json::Map<String, serde_json::Value>,
}

impl Battery {
    fn group(&mut self, name: &str, f: impl FnOnce(f64) -> Result<Vec<Check>>) {
        let start = Instant::now();
        match f(self.scale) {
            Ok(checks) => self.checks.extend(checks),
            Err(e) => {
                self.errors.insert(name.into(), json!(e.to_string()));
                self.checks.push(Check::at_most(name, f64::NAN, 0.0));
            }
        }
        log::info!("verify: {name} took {:.2} s", start.elapsed().as_secs_f64());
    }
}

fn polar3(rng: &mut StdRng, lo: f64, hi: f64) -> [f64; 3] {
    let r = (lo.ln() + rng.gen::<f64>() * (hi / lo).ln()).exp();
    [
        r,
        rng.gen_range(0.15..PI - 0.15),
        rng.gen_range(0.0..2.0 * PI),
    ]
}

/// Largest `|dual − fd| / max(|dual|, 1)` over the points and outputs.
fn gradient_error<const N: usize>(
    points: &[[f64; N]],
    plain: impl Fn(&[f64; N]) -> Vec<f64>,
    dual: impl Fn(&[Dual<f64, N>; N]) -> Vec<Dual<f64, N>>,
) -> f64 {
    let mut worst = 0.0f64;
    for x in points {
        let exact = dual(&seed(*x));
        for k in 0..N {
            let (mut xp, mut xm) = (*x, *x);
            xp[k] += FD_STEP;
            xm[k] -= FD_STEP;
            let (fp, fm) = (plain(&xp), plain(&xm));
            for (c, e) in exact.iter().enumerate() {
                let fd = (fp[c] - fm[c]) / (2.0 * FD_STEP);
                worst = worst.max((e.d[k] - fd).abs() / e.d[k].abs().max(1.0));
            }
        }
    }
    worst
}

fn metric_error<M: SpacetimeMetric>(metric: &M, points: &[[f64; 4]]) -> f64 {
    gradient_error(
        points,
        |x| metric.components(x).iter().flatten().copied().collect(),
        |x| metric.components(x).iter().flatten().copied().collect(),
    )
}

fn data_error<D: InitialData>(data: &D, points: &[[f64; 3]]) -> f64 {
    gradient_error(
        points,
        |x| {
            let (g, h) = evaluate(data, x).expect("probe inside the domain");
            g.iter().chain(h.iter()).flatten().copied().collect()
        },
        |x| {
            let g = data.metric(x).expect("probe inside the domain");
            let h = data.second_form(x).expect("probe inside the domain");
            g.iter().chain(h.iter()).flatten().copied().collect()
        },
    )
}

fn schwarzschild_cartesian(m: f64) -> Result<Pullback<Schwarzschild, PolarFromCartesianSlice>> {
    Ok(Pullback::new(
        Schwarzschild::new(m, Chart4::StaticPolar)?,
        PolarFromCartesianSlice { t0: 0.0 },
        Frame::cartesian(),
    )?)
}

fn kerr_cartesian() -> Result<Pullback<Kerr, PolarFromCartesianSlice>> {
    Ok(Pullback::new(
        Kerr::new(KerrParameters::new(1.0, 0.5)?),
        PolarFromCartesianSlice { t0: 0.0 },
        Frame::cartesian(),
    )?)
}

fn max_abs_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    (0..9)
        .map(|k| (a[k / 3][k % 3] - b[k / 3][k % 3]).abs())
        .fold(0.0, f64::max)
}

/// Run every check; `scale` multiplies the absolute tolerances.
pub fn verify(scale: f64) -> Result<Output> {
    let mut b = Battery {
        scale,
        checks: Vec::new(),
        errors: Default::default(),
    };
    let grid48 = SphereGrid::default_grid();
    let grid24 = SphereGrid::new(24, 48)?;
    let grid12 = SphereGrid::new(12, 24)?;
    let coarse = SphereGrid::new(6, 12)?;

    b.group("adm_schwarzschild", |s| {
        let c = adm_energy_momentum(&schwarzschild_cartesian(1.0)?, &adm::DEFAULT_RADII, &grid48)?;
        Ok(vec![
            Check::at_most("adm_schwarzschild_energy", (c.e() - 1.0).abs(), 1e-3 * s),
            Check::at_most(
                "adm_schwarzschild_momentum",
                c.p().iter().fold(0.0f64, |m, p| m.max(p.abs())),
                1e-6 * s,
            ),
            Check::at_least("adm_schwarzschild_pmt", check_pmt_flat(&c), 0.0),
        ])
    });

    b.group("adm_kerr", |s| {
        let data = kerr_cartesian()?;
        let c = adm_energy_momentum(&data, &adm::DEFAULT_RADII, &grid48)?;
        let decay = check_af_decay(&data, &[10.0, 20.0, 40.0, 80.0, 160.0], &grid12)?;
        let slack = decay
            .fits
            .iter()
            .zip(adm::AfDecay::REQUIRED)
            .map(|(f, req)| f.exponent() - (req - 0.3))
            .fold(f64::INFINITY, f64::min);
        Ok(vec![
            Check::at_most("adm_kerr_energy", (c.e() - 1.0).abs(), 1e-2 * s),
            Check::at_most(
                "adm_kerr_momentum",
                c.p().iter().fold(0.0f64, |m, p| m.max(p.abs())),
                1e-4 * s,
            ),
            Check::at_least("af_decay_kerr", slack, 0.0),
        ])
    });

    b.group("adm_minkowski", |s| {
        let data = Pullback::new(
            Minkowski::new(Chart4::StaticPolar),
            PolarFromCartesianSlice { t0: 0.0 },
            Frame::cartesian(),
        )?;
        let c = adm_energy_momentum(&data, &adm::DEFAULT_RADII, &*SphereGrid::new(16, 32)?)?;
        let worst = c.p().iter().fold(c.e().abs(), |m, p| m.max(p.abs()));
        Ok(vec![Check::at_most("adm_minkowski_zero", worst, 1e-12 * s)])
    });

    b.group("vacuum_constraints", |s| {
        let sch = Pullback::new(
            Schwarzschild::new(1.0, Chart4::StaticPolar)?,
            StaticSlice::new(0.0),
            Frame::hyperbolic(),
        )?;
        let a = dec_survey(
            &sch,
            &shell_points(Frame::hyperbolic(), &[3.0, 10.0, 30.0, 100.0], &coarse),
        )?;
        let bondi = slice_pullback(
            &BondiExpansion::schwarzschild(1.0),
            &SliceSpec::default(),
            20.0,
        )?;
        let c = dec_survey(
            &bondi,
            &shell_points(Frame::hyperbolic(), &[20.0, 40.0, 80.0, 160.0], &coarse),
        )?;
        let worst =
            |r: &charges_core::dec::DecReport| r.max_abs_mu.max(r.max_varpi_norm).max(r.max_sigma);
        Ok(vec![
            Check::at_most("constraints_schwarzschild_static", worst(&a), 1e-5 * s),
            Check::at_most("constraints_bondi_schwarzschild", worst(&c), 1e-5 * s),
        ])
    });

    b.group("sigma_symmetric", |_| {
        let mut rng = StdRng::seed_from_u64(SEED);
        let mut worst = 0.0f64;
        for k in 0..PROBES {
            let data = PerturbedHyperboloid::symmetric(
                0.1 + 0.003 * k as f64,
                -0.2,
                1.0 + 0.02 * k as f64,
            );
            let q =
                PointAnalysis::new(&data, &polar3(&mut rng, 0.5, 50.0))?.constraint_quantities();
            worst = q.sigma.iter().fold(worst, |m, s| m.max(s.abs()));
        }
        let slice = slice_pullback(&biaxial(), &biaxial_slice(), 20.0)?;
        for x in shell_points(Frame::hyperbolic(), &[20.0, 60.0], &coarse) {
            let q = PointAnalysis::new(&slice, &x)?.constraint_quantities();
            worst = q.sigma.iter().fold(worst, |m, s| m.max(s.abs()));
        }
        Ok(vec![Check::at_most("sigma_symmetric", worst, 0.0)])
    });

    b.group("hyperboloid", |s| {
        let mut rng = StdRng::seed_from_u64(SEED);
        let points: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 0.05, 200.0)).collect();
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let stat = Pullback::new(
            Minkowski::new(Chart4::StaticPolar),
            Hyperboloid::static_polar(),
            Frame::hyperbolic(),
        )?;
        let ret = Pullback::new(
            Minkowski::new(Chart4::Retarded),
            Hyperboloid::retarded(),
            Frame::hyperbolic(),
        )?;
        let (mut ident, mut rigid) = (0.0f64, 0.0f64);
        for x in &points {
            for (g, h) in [evaluate(&stat, x)?, evaluate(&ret, x)?] {
                ident = ident.max(max_abs_diff(&g, &id)).max(max_abs_diff(&h, &id));
            }
            rigid = rigid.max(PointAnalysis::new(&stat, x)?.rigidity_residual().max());
            rigid = rigid.max(PointAnalysis::new(&ret, x)?.rigidity_residual().max());
        }
        let charges = null_energy_momentum(&ret, &charges_core::null::DEFAULT_RADII, &grid24)?;
        Ok(vec![
            Check::at_most("hyperboloid_identity", ident, 1e-10 * s),
            Check::at_most("hyperboloid_null_charges", charges.max_abs(), 1e-12 * s),
            Check::at_most("hyperboloid_rigidity", rigid, 1e-7 * s),
        ])
    });

    b.group("bondi_energy_momentum", |s| {
        let m = 1.7;
        let field = SphereField::from_fn(&grid48, |t, _| m * (1.0 + 0.5 * t.cos()))?;
        let e = bondi_energy_momentum(&field)?;
        let want = [m, 0.0, 0.0, m / 6.0];
        let worst = e
            .iter()
            .zip(want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(vec![Check::at_most(
            "bondi_energy_momentum_dipole",
            worst,
            1e-10 * s,
        )])
    });

    b.group("mass_loss", |s| {
        let alpha = 0.1;
        let t = evolve_energy_momentum(
            [1.0, 0.0, 0.0, 0.0],
            &quadrupole(alpha, 0.0, 1.0),
            0.0,
            10.0,
            0.01,
            &grid48,
        )?;
        let f0 = 8.0 * alpha * alpha / 15.0;
        let flux = t.flux.iter().map(|f| (f[0] - f0).abs()).fold(0.0, f64::max);
        let end = t.m.last().expect("nonempty trajectory")[0];
        let loss = mass_loss_margin(&t)?;
        Ok(vec![
            Check::at_most("mass_loss_flux", flux, 1e-10 * s),
            Check::at_most("mass_loss_final", (end - (1.0 - f0 * 10.0)).abs(), 1e-8 * s),
            Check::at_most("mass_loss_rate", loss.max_discrete, 1e-9 * s),
            Check::at_most("flux_chain", loss.max_holder_excess, 0.0),
        ])
    });

    b.group("zero_news", |_| {
        let exp = BondiExpansion::schwarzschild(1.0);
        let t = evolve_energy_momentum([1.0, 0.0, 0.0, 0.0], &exp, 0.0, 5.0, 0.1, &grid12)?;
        let drift =
            t.m.iter()
                .flatten()
                .zip([1.0, 0.0, 0.0, 0.0].iter().cycle())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        let rate = t.dmargin_du.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        Ok(vec![Check::at_most(
            "zero_news_constant",
            drift.max(rate),
            0.0,
        )])
    });

    b.group("consistency", |_| {
        let quad = SliceSpec {
            u0: 0.3,
            ..Default::default()
        };
        let q = expansion_consistency(
            &quadrupole(0.1, 0.0, 1.0),
            &quad,
            &CONSISTENCY_RADII,
            &grid24,
        )?;
        let x = expansion_consistency(&biaxial(), &biaxial_slice(), &CONSISTENCY_RADII, &grid24)?;
        Ok(vec![
            Check::at_least("consistency_quadrupole", q.min_exponent(), 3.3),
            Check::at_least("consistency_biaxial", x.min_exponent(), 3.3),
        ])
    });

    b.group("decay_orders", |_| {
        let sch = slice_pullback(
            &BondiExpansion::schwarzschild(1.0),
            &SliceSpec::default(),
            10.0,
        )?;
        let o = estimate_decay_orders(&sch, &[10.0, 20.0, 40.0, 80.0, 160.0], &grid12)?;
        let a11 = o.get(Component::A(0, 0)).exponent();
        let u0 = 10.0;
        let spec = SliceSpec {
            u0,
            ..Default::default()
        };
        let vn = slice_pullback(&vanishing_news(u0, 1.0), &spec, 50.0)?;
        let o = estimate_decay_orders(&vn, &CONSISTENCY_RADII, &grid12)?;
        Ok(vec![
            Check::at_most("decay_schwarzschild_bondi", (a11 - 3.0).abs(), 0.1),
            Check::at_least("decay_vanishing_news", o.tau_hat, 1.9),
        ])
    });

    b.group("positivity", |s| {
        let opts = ScenarioOptions {
            u_start: 0.0,
            step: 0.05,
            radii: charges_core::null::DEFAULT_RADII.to_vec(),
            rigidity_radii: vec![20.0, 80.0],
        };
        let rep = vanishing_news_scenario(&quadrupole(0.1, 10.0, 1.0), 10.0, &opts, &grid24)?;
        let pmt = check_pmt_null(&rep.null);
        Ok(vec![
            Check::at_least("positivity_margin", rep.min_margin, 0.0),
            Check::at_least("positivity_pmt_null", pmt, -1e-4 * s),
        ])
    });

    b.group("oracle_dual_vs_fd", |s| {
        let mut rng = StdRng::seed_from_u64(SEED);
        let spacetime = |rng: &mut StdRng, lo: f64| -> Vec<[f64; 4]> {
            (0..PROBES)
                .map(|_| {
                    let [r, t, p] = polar3(rng, lo, 60.0);
                    [rng.gen_range(-1.0..1.0), r, t, p]
                })
                .collect()
        };
        let pts = spacetime(&mut rng, 3.0);
        let mut worst = metric_error(&Minkowski::new(Chart4::StaticPolar), &pts);
        worst = worst.max(metric_error(
            &Schwarzschild::new(1.0, Chart4::StaticPolar)?,
            &pts,
        ));
        worst = worst.max(metric_error(
            &Schwarzschild::new(1.0, Chart4::Retarded)?,
            &pts,
        ));
        worst = worst.max(metric_error(
            &Kerr::new(KerrParameters::new(1.0, 0.5)?),
            &pts,
        ));
        let far = spacetime(&mut rng, 5.0);
        worst = worst.max(metric_error(&BondiMetric::with_r_min(biaxial(), 5.0), &far));
        let pts: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 0.5, 60.0)).collect();
        let hyp = Pullback::new(
            Minkowski::new(Chart4::StaticPolar),
            Hyperboloid::static_polar(),
            Frame::hyperbolic(),
        )?;
        worst = worst.max(data_error(&hyp, &pts));
        let mut pert = PerturbedHyperboloid::symmetric(0.3, 0.2, 2.0);
        pert.antisym = 0.5;
        worst = worst.max(data_error(&pert, &pts));
        let far: Vec<[f64; 3]> = (0..PROBES).map(|_| polar3(&mut rng, 8.0, 80.0)).collect();
        worst = worst.max(data_error(
            &slice_pullback(&biaxial(), &biaxial_slice(), 5.0)?,
            &far,
        ));
        Ok(vec![Check::at_most("oracle_dual_vs_fd", worst, 1e-6 * s)])
    });

    b.group("oracle_connection", |s| {
        let mut rng = StdRng::seed_from_u64(SEED);
        let mut worst = 0.0f64;
        for _ in 0..PROBES {
            let x = polar3(&mut rng, 0.2, 100.0);
            let koszul = frame_connection(&HyperboloidModel, &x)?;
            let closed = HyperbolicBackground::connection(x[0], x[1]);
            for l in 0..3 {
                worst = worst.max(max_abs_diff(&koszul.gamma[l], &closed[l]));
            }
        }
        Ok(vec![Check::at_most("oracle_connection", worst, 1e-8 * s)])
    });

    b.group("quadrature_direction_products", |s| {
        let mut worst = 0.0f64;
        for grid in [&grid48, &grid24, &coarse] {
            for mu in 0..4 {
                for nu in 0..4 {
                    let f = SphereField::from_fn(grid, |t, p| {
                        direction(mu, t, p) * direction(nu, t, p)
                    })?;
                    let want = match (mu, nu) {
                        (0, 0) => 4.0 * PI,
                        (m, n) if m == n => 4.0 * PI / 3.0,
                        _ => 0.0,
                    };
                    worst = worst.max((f.integrate() - want).abs());
                }
            }
        }
        Ok(vec![Check::at_most(
            "quadrature_direction_products",
            worst,
            1e-12 * s,
        )])
    });

    b.group("regularity", |_| {
        let us = [0.0, 0.4, 1.0, 5.0];
        let exp = biaxial();
        let a = condition_a(&exp, &us, 30.0);
        let bb = condition_b(&exp.c, &us);
        // Y20 is nonzero at the poles: the ring integral there is 2π Y20(0).
        let y20 = AngularField::harmonic(2, 0, vec![1.0])?;
        let pole = condition_b(&y20, &[0.0]).max_violation;
        let want = 2.0 * PI * (5.0 / (4.0 * PI)).sqrt();
        Ok(vec![
            Check::at_most("condition_a_biaxial", a.max_violation, a.tolerance),
            Check::at_most("condition_b_biaxial", bb.max_violation, bb.tolerance),
            Check::at_most("condition_b_pole_limit", (pole - want).abs(), 1e-8),
        ])
    });

    b.group("future_causal_flux", |_| {
        let exp = biaxial();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..21 {
            let f =
                charges_core::bondi::radiation::news_flux(&exp, -2.0 + 0.2 * k as f64, &grid24)?;
            worst = worst.max(spatial_norm(&f) - f[0]);
        }
        Ok(vec![Check::at_most("flux_chain_biaxial", worst, 0.0)])
    });

    let mut csv = String::from("name,value,threshold,relation,passed\n");
    for c in &b.checks {
        let rel = if c.relation == Relation::AtMost {
            "<="
        } else {
            ">="
        };
        csv.push_str(&format!(
            "{},{},{},{rel},{}\n",
            c.name,
            sci(c.value),
            sci(c.threshold),
            c.passed
        ));
    }
    let names: Vec<&str> = b.checks.iter().map(|c| c.name.as_str()).collect();
    Ok(Output {
        results: json!({
            "count": b.checks.len(),
            "names": names,
            "errors": b.errors,
        }),
        checks: b.checks,
        csv: Some(csv),
    })
}
