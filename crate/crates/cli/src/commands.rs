//! The scenario subcommands.

use std::sync::Arc;

use charges_core::adm::{
    adm_energy_momentum, check_af_decay, check_dec_flat, check_pmt_flat, AdmCharges, AfDecay,
};
use charges_core::bondi::radiation::{
    bondi_energy_momentum, condition_a, condition_b, evolve_energy_momentum, mass_loss_margin,
    sample, spatial_norm,
};
use charges_core::bondi::scenario::{vanishing_news_scenario, ScenarioOptions};
use charges_core::bondi::slice::{expansion_consistency, slice_pullback, COMPONENT_NAMES};
use charges_core::dec::shell_points;
use charges_core::fit::Extrapolation;
use charges_core::geometry::{Chart4, Frame, Pullback};
use charges_core::null::{
    check_dec_null, check_pmt_null, decay_ladder, estimate_decay_orders, null_energy_momentum,
    DecayOrders, NullCharges,
};
use charges_core::spacetimes::{
    BondiMetric, BondiSlice, Kerr, KerrParameters, Minkowski, PolarFromCartesianSlice,
    Schwarzschild, Spacetime,
};
use charges_core::sphere::SphereGrid;
use serde_json::json;

use crate::config::{Preset, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::report::{csv_table, Check};

/// What a subcommand produces before it is wrapped into a report.
pub struct Output {
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub csv: Option<String>,
}

/// `n` radii spaced evenly in `log r` over `[lo, hi]`.
pub fn log_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Grid for pointwise surveys: the run grid capped at 12 × 24.
fn survey_grid(cfg: &ScenarioConfig) -> Result<Arc<SphereGrid>> {
    Ok(SphereGrid::new(cfg.n_theta.min(12), cfg.n_psi.min(24))?)
}

fn dec_radii(cfg: &ScenarioConfig) -> Vec<f64> {
    log_radii(
        cfg.radii[0],
        *cfg.radii.last().expect("validated ladder"),
        10,
    )
}

pub type AdmData = Pullback<Spacetime, PolarFromCartesianSlice>;
pub type SliceData = Pullback<BondiMetric, BondiSlice>;

/// The `t = 0` slice of a spatial preset in Cartesian coordinates.
pub fn adm_data(cfg: &ScenarioConfig) -> Result<AdmData> {
    let p = cfg.parameters;
    let metric = match cfg.preset {
        Preset::Minkowski => Spacetime::Minkowski(Minkowski::new(Chart4::StaticPolar)),
        Preset::Schwarzschild => Spacetime::Schwarzschild(Schwarzschild::new(p.m, Chart4::StaticPolar)?),
        Preset::Kerr => Spacetime::Kerr(Kerr::new(KerrParameters::new(p.m, p.a)?)),
        other => {
            return Err(CliError::Usage(format!(
                "preset `{}` has no asymptotically flat slice; `adm` takes minkowski, schwarzschild or kerr",
                other.name()
            )))
        }
    };
    Ok(Pullback::new(
        metric,
        PolarFromCartesianSlice { t0: 0.0 },
        Frame::cartesian(),
    )?)
}

/// The `u₀` slice of a Bondi preset, valid for `r ≥ r_min`.
pub fn slice_data(cfg: &ScenarioConfig, r_min: f64) -> Result<SliceData> {
    if !cfg.preset.is_bondi() {
        return Err(CliError::Usage(format!(
            "preset `{}` has no asymptotically null slice; use minkowski or a bondi-* preset",
            cfg.preset.name()
        )));
    }
    Ok(slice_pullback(cfg.expansion()?, &cfg.slice, r_min)?)
}

fn stability_check(warnings: usize) -> Check {
    Check::at_most("extrapolation_stable", warnings as f64, 0.0)
}

fn af_slack(decay: &AfDecay) -> f64 {
    decay
        .fits
        .iter()
        .zip(AfDecay::REQUIRED)
        .map(|(f, req)| f.exponent() - (req - 0.3))
        .fold(f64::INFINITY, f64::min)
}

fn adm_warnings(c: &AdmCharges) -> usize {
    std::iter::once(&c.energy)
        .chain(&c.momentum)
        .filter(|x| x.divergence_warning)
        .count()
}

fn null_extrapolations(c: &NullCharges) -> impl Iterator<Item = &Extrapolation> {
    c.energy.iter().chain(c.momentum.iter().flatten())
}

pub fn adm(cfg: &ScenarioConfig, strict: bool) -> Result<Output> {
    let data = adm_data(cfg)?;
    let grid = cfg.grid()?;
    let charges = adm_energy_momentum(&data, &cfg.radii, &grid)?;
    let survey = survey_grid(cfg)?;
    let decay = check_af_decay(&data, &decay_ladder(&cfg.radii), &survey)?;
    let radii = dec_radii(cfg);
    let dec = check_dec_flat(&data, &shell_points(Frame::cartesian(), &radii, &survey))?;
    let pmt = check_pmt_flat(&charges);
    let tol = &cfg.tolerances;
    let mut checks = vec![
        Check::at_least("dec", dec.min_margin, -tol.dec),
        Check::at_least("pmt", pmt, -tol.pmt),
        Check::at_least("af_decay", af_slack(&decay), 0.0),
    ];
    if strict {
        checks.push(stability_check(adm_warnings(&charges)));
    }
    let csv = csv_table(
        &["r", "E", "P1", "P2", "P3"],
        cfg.radii.iter().enumerate().map(|(k, &r)| {
            vec![
                r,
                charges.energy.samples[k],
                charges.momentum[0].samples[k],
                charges.momentum[1].samples[k],
                charges.momentum[2].samples[k],
            ]
        }),
    );
    Ok(Output {
        results: json!({
            "energy": charges.e(),
            "momentum": charges.p(),
            "pmt_margin": pmt,
            "charges": charges,
            "dec": { "radii": radii, "report": dec },
            "af_decay": decay,
        }),
        checks,
        csv: Some(csv),
    })
}

/// Null charges, or the decay orders and reason when the slice fails the decay gate.
fn gated_null_charges(
    data: &SliceData,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<std::result::Result<NullCharges, (String, DecayOrders)>> {
    match null_energy_momentum(data, radii, grid) {
        Ok(c) => Ok(Ok(c)),
        Err(charges_core::Error::Precondition(reason)) => {
            let orders = estimate_decay_orders(data, &decay_ladder(radii), grid)?;
            Ok(Err((reason, orders)))
        }
        Err(e) => Err(e.into()),
    }
}

/// News-free expansions are exact vacuum metrics; truncated radiating ones are not.
fn is_vacuum(cfg: &ScenarioConfig) -> bool {
    cfg.expansion
        .as_ref()
        .is_some_and(|e| e.c.is_zero() && e.d.is_zero())
}

fn null_csv(radii: &[f64], c: &NullCharges) -> String {
    let mut header = vec!["r".to_string()];
    header.extend((0..4).map(|nu| format!("E{nu}")));
    for nu in 0..4 {
        header.extend((1..4).map(|k| format!("P{nu}{k}")));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(
        &header,
        radii.iter().enumerate().map(|(i, &r)| {
            std::iter::once(r)
                .chain(null_extrapolations(c).map(|x| x.samples[i]))
                .collect()
        }),
    )
}

fn null_results(c: &NullCharges) -> serde_json::Value {
    json!({
        "energy": (0..4).map(|nu| c.e(nu)).collect::<Vec<_>>(),
        "momentum": (0..4).map(|nu| [c.p(nu, 1), c.p(nu, 2), c.p(nu, 3)]).collect::<Vec<_>>(),
        "lorentz_margins": c.lorentz_margins(),
        "tau_hat": c.decay.tau_hat,
        "charges": c,
    })
}

pub fn null(cfg: &ScenarioConfig, strict: bool) -> Result<Output> {
    let data = slice_data(cfg, cfg.radii[0])?;
    let grid = cfg.grid()?;
    let tol = &cfg.tolerances;
    let radii = dec_radii(cfg);
    let dec = check_dec_null(
        &data,
        &shell_points(Frame::hyperbolic(), &radii, &*survey_grid(cfg)?),
    )?;
    let vacuum = is_vacuum(cfg);
    let mut checks = Vec::new();
    let (mut results, csv) = match gated_null_charges(&data, &cfg.radii, &grid)? {
        Ok(charges) => {
            let pmt = check_pmt_null(&charges);
            checks.push(Check::at_least(
                "decay_gate",
                charges.decay.tau_hat,
                tol.decay_gate,
            ));
            checks.push(Check::at_least("pmt_null", pmt, -tol.pmt));
            if strict {
                checks.push(stability_check(
                    null_extrapolations(&charges)
                        .filter(|x| x.divergence_warning)
                        .count(),
                ));
            }
            let mut results = null_results(&charges);
            results["pmt_margin"] = json!(pmt);
            (results, Some(null_csv(&cfg.radii, &charges)))
        }
        Err((reason, orders)) => {
            checks.push(Check::at_least(
                "decay_gate",
                orders.tau_hat,
                tol.decay_gate,
            ));
            (
                json!({ "skipped": reason, "tau_hat": orders.tau_hat, "decay": orders }),
                None,
            )
        }
    };
    if vacuum {
        checks.push(Check::at_least("dec", dec.min_margin, -tol.dec));
    }
    results["dec"] = json!({ "radii": radii, "checked": vacuum, "report": dec });
    Ok(Output {
        results,
        checks,
        csv,
    })
}

fn condition_checks(
    cfg: &ScenarioConfig,
    u_samples: &[f64],
) -> Result<(Vec<Check>, serde_json::Value)> {
    let exp = cfg.expansion()?;
    let a = condition_a(exp, u_samples, cfg.radii[0]);
    let b = condition_b(&exp.c, u_samples);
    let checks = vec![
        Check::at_most("condition_a", a.max_violation, a.tolerance),
        Check::at_most("condition_b", b.max_violation, b.tolerance),
    ];
    Ok((checks, json!({ "condition_a": a, "condition_b": b })))
}

pub fn bondi_evolve(cfg: &ScenarioConfig) -> Result<Output> {
    let exp = cfg.expansion()?;
    let grid = cfg.grid()?;
    let t = cfg.time;
    let m_start = bondi_energy_momentum(&sample(&exp.mass, t.u0, &grid)?)?;
    let traj = evolve_energy_momentum(m_start, exp, t.u0, t.u1, t.du, &grid)?;
    let loss = mass_loss_margin(&traj)?;
    let tol = &cfg.tolerances;
    let (mut checks, conditions) = condition_checks(cfg, &t.samples(11))?;
    checks.insert(
        0,
        Check::at_most("mass_loss", loss.max_discrete, tol.mass_loss),
    );
    checks.insert(
        1,
        Check::at_most("flux_chain", loss.max_holder_excess, tol.holder),
    );
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)
        .map_err(|e| CliError::io("rendering trajectory", e))?;
    let m_end = *traj.m.last().expect("nonempty trajectory");
    Ok(Output {
        results: json!({
            "samples": traj.len(),
            "m_start": m_start,
            "m_end": m_end,
            "margin_start": m_start[0] - spatial_norm(&m_start),
            "margin_end": m_end[0] - spatial_norm(&m_end),
            "min_margin": traj.margin.iter().copied().fold(f64::INFINITY, f64::min),
            "max_flux0": traj.flux.iter().map(|f| f[0]).fold(0.0, f64::max),
            "mass_loss": loss,
            "conditions": conditions,
        }),
        checks,
        csv: Some(String::from_utf8(csv).expect("ASCII CSV")),
    })
}

pub fn bondi_slice(cfg: &ScenarioConfig, strict: bool) -> Result<Output> {
    let exp = cfg.expansion()?;
    let grid = cfg.grid()?;
    let tol = &cfg.tolerances;
    let consistency = expansion_consistency(exp, &cfg.slice, &cfg.consistency_radii, &grid)?;
    let data = slice_data(cfg, cfg.radii[0])?;
    let u0 = cfg.time.u0;
    let (conds, conditions) = condition_checks(cfg, &[u0])?;
    let mut checks = vec![Check::at_least(
        "consistency_order",
        consistency.min_exponent(),
        tol.consistency_order,
    )];
    checks.extend(conds);
    // Charges exist only when the slice passes the decay gate, i.e. the news vanishes at u₀.
    let mut results = match gated_null_charges(&data, &cfg.radii, &grid)? {
        Ok(charges) => {
            let pmt = check_pmt_null(&charges);
            checks.push(Check::at_least("pmt_null", pmt, -tol.pmt));
            if strict {
                checks.push(stability_check(
                    null_extrapolations(&charges)
                        .filter(|x| x.divergence_warning)
                        .count(),
                ));
            }
            let mut r = null_results(&charges);
            r["pmt_margin"] = json!(pmt);
            r
        }
        Err((reason, orders)) => {
            json!({ "skipped": reason, "tau_hat": orders.tau_hat, "decay": orders })
        }
    };

    // Backward evolution from a slice of vanishing news.
    let scenario = if cfg.time.u1 < u0 {
        let opts = ScenarioOptions {
            u_start: cfg.time.u1,
            step: cfg.time.du,
            radii: cfg.radii.clone(),
            rigidity_radii: vec![cfg.radii[0], *cfg.radii.last().expect("validated ladder")],
        };
        match vanishing_news_scenario(exp, u0, &opts, &grid) {
            Ok(rep) => {
                checks.push(Check::at_least(
                    "positivity",
                    rep.min_margin,
                    -tol.positivity,
                ));
                checks.push(Check::at_least(
                    "scenario_pmt_null",
                    rep.null_pmt_margin,
                    -tol.pmt,
                ));
                json!({
                    "u_start": cfg.time.u1,
                    "m_final": rep.m_final,
                    "min_margin": rep.min_margin,
                    "mass_loss": rep.mass_loss,
                    "null_pmt_margin": rep.null_pmt_margin,
                    "energy_mass_gap": rep.energy_mass_gap,
                    "max_rigidity_residual": rep.max_rigidity_residual,
                })
            }
            Err(charges_core::Error::Precondition(reason)) => json!({ "skipped": reason }),
            Err(e) => return Err(e.into()),
        }
    } else {
        json!({ "skipped": "time.u1 does not precede time.u0" })
    };

    let mut header = vec!["r"];
    header.extend(COMPONENT_NAMES);
    let csv = csv_table(
        &header,
        consistency.radii.iter().enumerate().map(|(i, &r)| {
            std::iter::once(r)
                .chain(consistency.components.iter().map(|c| c.norms[i]))
                .collect()
        }),
    );
    results["consistency"] = json!({
        "min_exponent": consistency.min_exponent(),
        "report": consistency,
    });
    results["conditions"] = conditions;
    results["scenario"] = scenario;
    Ok(Output {
        results,
        checks,
        csv: Some(csv),
    })
}

/// Limits and uncertainties of every charge of the preset's family.
fn charge_limits(
    cfg: &ScenarioConfig,
    radii: &[f64],
    grid: &SphereGrid,
) -> Result<Vec<(f64, f64)>> {
    let pick = |x: &Extrapolation| (x.limit, x.uncertainty);
    if cfg.preset.is_spatial() {
        let c = adm_energy_momentum(&adm_data(cfg)?, radii, grid)?;
        Ok(std::iter::once(&c.energy)
            .chain(&c.momentum)
            .map(pick)
            .collect())
    } else {
        let c = null_energy_momentum(&slice_data(cfg, radii[0])?, radii, grid)?;
        Ok(null_extrapolations(&c).map(pick).collect())
    }
}

fn largest_change(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.0 - y.0).abs())
        .fold(0.0, f64::max)
}

pub fn converge(cfg: &ScenarioConfig) -> Result<Output> {
    let (nt, np) = (cfg.n_theta, cfg.n_psi);
    let grids = [
        ((nt / 4).max(2), (np / 4).max(4)),
        ((nt / 2).max(2), (np / 2).max(4)),
        (nt, np),
    ];
    let mut rows = Vec::new();
    let mut grid_study = Vec::new();
    for (a, b) in grids {
        let q = charge_limits(cfg, &cfg.radii, &*SphereGrid::new(a, b)?)?;
        rows.push((a, b, cfg.radii.clone(), q.clone()));
        grid_study.push(json!({ "n_theta": a, "n_psi": b, "limits": q.iter().map(|x| x.0).collect::<Vec<_>>() }));
    }
    let full = rows[2].3.clone();
    let grid = cfg.grid()?;
    let mut extended = cfg.radii.clone();
    extended.push(2.0 * extended.last().expect("validated ladder"));
    let ext = charge_limits(cfg, &extended, &grid)?;
    rows.push((nt, np, extended.clone(), ext.clone()));

    let floor = 1e-10 * cfg.tolerances.scale;
    let uncertainty = full.iter().map(|x| x.1).fold(floor, f64::max);
    let grid_change = largest_change(&full, &rows[1].3);
    let ladder_change = largest_change(&full, &ext);
    let checks = vec![
        Check::at_most("grid_refinement", grid_change, uncertainty),
        Check::at_most("ladder_refinement", ladder_change, uncertainty),
    ];
    let width = full.len();
    let mut header = vec![
        "n_theta".to_string(),
        "n_psi".to_string(),
        "rungs".to_string(),
        "r_max".to_string(),
    ];
    header.extend((0..width).map(|k| format!("q{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = csv_table(
        &header,
        rows.iter().map(|(a, b, radii, q)| {
            [
                *a as f64,
                *b as f64,
                radii.len() as f64,
                *radii.last().unwrap(),
            ]
            .into_iter()
            .chain(q.iter().map(|x| x.0))
            .collect()
        }),
    );
    Ok(Output {
        results: json!({
            "family": if cfg.preset.is_spatial() { "adm" } else { "null" },
            "grids": grid_study,
            "extended_radii": extended,
            "extended_limits": ext.iter().map(|x| x.0).collect::<Vec<_>>(),
            "uncertainties": full.iter().map(|x| x.1).collect::<Vec<_>>(),
            "grid_change": grid_change,
            "ladder_change": ladder_change,
        }),
        checks,
        csv: Some(csv),
    })
}
