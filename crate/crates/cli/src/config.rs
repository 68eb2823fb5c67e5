//! Scenario configuration: a TOML file, optional command-line overrides and
//! per-preset defaults, resolved into a validated [`ScenarioConfig`].

use std::sync::Arc;

use charges_core::bondi::radiation::condition_b;
use charges_core::bondi::scenario::{biaxial, biaxial_slice, quadrupole, vanishing_news};
use charges_core::bondi::{AngularField, BondiExpansion, TimeProfile};
use charges_core::spacetimes::SliceSpec;
use charges_core::sphere::SphereGrid;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::report::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Minkowski,
    Schwarzschild,
    Kerr,
    BondiSchwarzschild,
    BondiQuadrupole,
    BondiBiaxial,
    BondiVanishingNews,
    BondiCustom,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Minkowski,
        Preset::Schwarzschild,
        Preset::Kerr,
        Preset::BondiSchwarzschild,
        Preset::BondiQuadrupole,
        Preset::BondiBiaxial,
        Preset::BondiVanishingNews,
        Preset::BondiCustom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Minkowski => "minkowski",
            Preset::Schwarzschild => "schwarzschild",
            Preset::Kerr => "kerr",
            Preset::BondiSchwarzschild => "bondi-schwarzschild",
            Preset::BondiQuadrupole => "bondi-quadrupole",
            Preset::BondiBiaxial => "bondi-biaxial",
            Preset::BondiVanishingNews => "bondi-vanishing-news",
            Preset::BondiCustom => "bondi-custom",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
                CliError::Config(format!(
                    "unknown preset `{name}`; known presets: {}",
                    known.join(", ")
                ))
            })
    }

    /// Parameters the preset reads, with their defaults.
    fn parameters(self) -> &'static [(&'static str, f64)] {
        match self {
            Preset::Minkowski | Preset::BondiBiaxial | Preset::BondiCustom => &[],
            Preset::Schwarzschild | Preset::BondiSchwarzschild => &[("m", 1.0)],
            Preset::Kerr => &[("m", 1.0), ("a", 0.5)],
            Preset::BondiQuadrupole => &[("alpha", 0.1), ("u_null", 0.0), ("m", 1.0)],
            Preset::BondiVanishingNews => &[("u_null", 10.0), ("m", 1.0)],
        }
    }

    /// Presets with asymptotically flat Cartesian data.
    pub fn is_spatial(self) -> bool {
        matches!(
            self,
            Preset::Minkowski | Preset::Schwarzschild | Preset::Kerr
        )
    }

    /// Presets with a Bondi form; Minkowski has the trivial one.
    pub fn is_bondi(self) -> bool {
        !matches!(self, Preset::Schwarzschild | Preset::Kerr)
    }
}

/// One mode of a user-supplied angular field: a real harmonic `Y_lm` when
/// `l` is given, otherwise `sin^a θ cos^b θ trig(mψ)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub l: Option<u32>,
    pub sin_pow: Option<u32>,
    pub cos_pow: Option<u32>,
    #[serde(default)]
    pub m: i32,
    pub time: TimeProfile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParameters {
    pub m: Option<f64>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub u_null: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNews {
    pub c: Option<Vec<Term>>,
    pub d: Option<Vec<Term>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoefficients {
    #[serde(rename = "C")]
    pub big_c: Option<Vec<Term>>,
    #[serde(rename = "H")]
    pub big_h: Option<Vec<Term>>,
    #[serde(rename = "M")]
    pub mass: Option<Vec<Term>>,
    #[serde(rename = "N")]
    pub n: Option<Vec<Term>>,
    #[serde(rename = "P")]
    pub p: Option<Vec<Term>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSlice {
    pub a3: Option<Vec<Term>>,
    pub a4: Option<Vec<Term>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub n_theta: Option<usize>,
    pub n_psi: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub consistency_radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTime {
    pub u0: Option<f64>,
    pub u1: Option<f64>,
    pub du: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub dec: Option<f64>,
    pub pmt: Option<f64>,
    pub mass_loss: Option<f64>,
    pub holder: Option<f64>,
    pub positivity: Option<f64>,
    pub decay_gate: Option<f64>,
    pub consistency_order: Option<f64>,
}

/// The file as written, before defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema_version: Option<u32>,
    pub id: Option<String>,
    pub preset: Option<String>,
    #[serde(default)]
    pub parameters: RawParameters,
    #[serde(default)]
    pub news: RawNews,
    #[serde(default)]
    pub coefficients: RawCoefficients,
    #[serde(default)]
    pub slice: RawSlice,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub time: RawTime,
    #[serde(default)]
    pub tolerances: RawTolerances,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub n_theta: Option<usize>,
    pub n_psi: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub u0: Option<f64>,
    pub u1: Option<f64>,
    pub du: Option<f64>,
    pub tolerance_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Parameters {
    pub m: f64,
    pub a: f64,
    pub alpha: f64,
    pub u_null: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// DEC margins must be `≥ −dec`.
    pub dec: f64,
    /// Positive-mass margins must be `≥ −pmt`.
    pub pmt: f64,
    /// Largest discrete `d/du (m₀ − |m|)`.
    pub mass_loss: f64,
    /// Largest `√ΣF_i² − F₀`.
    pub holder: f64,
    /// `m₀ − |m| ≥ −positivity` along the backward evolution.
    pub positivity: f64,
    /// Smallest acceptable null decay order `τ̂`.
    pub decay_gate: f64,
    /// Smallest acceptable decay order of closed-form versus pulled-back slice data.
    pub consistency_order: f64,
    /// Factor already applied to `dec`, `pmt`, `mass_loss`, `holder` and `positivity`.
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            dec: 1e-5,
            pmt: 1e-4,
            mass_loss: 1e-9,
            holder: 1e-12,
            positivity: 1e-12,
            decay_gate: charges_core::null::DECAY_GATE,
            consistency_order: 3.3,
            scale: 1.0,
        }
    }
}

impl Tolerances {
    pub fn scaled(mut self, k: f64) -> Self {
        self.dec *= k;
        self.pmt *= k;
        self.mass_loss *= k;
        self.holder *= k;
        self.positivity *= k;
        self.scale *= k;
        self
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimeRange {
    pub u0: f64,
    pub u1: f64,
    pub du: f64,
}

impl TimeRange {
    pub fn span(&self) -> (f64, f64) {
        (self.u0.min(self.u1), self.u0.max(self.u1))
    }

    /// Evenly spaced sample times covering the run.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.span();
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

/// A validated scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub preset: Preset,
    pub parameters: Parameters,
    /// Bondi coefficients, for presets that have them.
    pub expansion: Option<BondiExpansion>,
    /// Free slice coefficients; `u0` always equals `time.u0`.
    pub slice: SliceSpec,
    pub n_theta: usize,
    pub n_psi: usize,
    pub radii: Vec<f64>,
    pub consistency_radii: Vec<f64>,
    pub time: TimeRange,
    pub tolerances: Tolerances,
    /// `field = value` for every value filled in from a default.
    pub defaulted: Vec<String>,
}

impl ScenarioConfig {
    pub fn grid(&self) -> Result<Arc<SphereGrid>> {
        Ok(SphereGrid::new(self.n_theta, self.n_psi)?)
    }

    pub fn expansion(&self) -> Result<&BondiExpansion> {
        self.expansion.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "preset `{}` has no Bondi form; use a bondi-* preset",
                self.preset.name()
            ))
        })
    }
}

pub const DEFAULT_N_THETA: usize = 48;
pub const DEFAULT_N_PSI: usize = 96;
pub const DEFAULT_RADII: [f64; 4] = charges_core::adm::DEFAULT_RADII;

/// Parse and validate a configuration file with no overrides.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    resolve(RawConfig::from_toml(text)?, &Overrides::default())
}

struct Defaults(Vec<String>);

impl Defaults {
    fn take<T: Copy + std::fmt::Debug>(&mut self, field: &str, given: Option<T>, default: T) -> T {
        given.unwrap_or_else(|| {
            log::info!("defaulted {field} = {default:?}");
            self.0.push(format!("{field} = {default:?}"));
            default
        })
    }

    fn take_vec(&mut self, field: &str, given: Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
        given.unwrap_or_else(|| {
            log::info!("defaulted {field} = {default:?}");
            self.0.push(format!("{field} = {default:?}"));
            default.to_vec()
        })
    }
}

fn field(terms: &[Term], name: &str) -> Result<AngularField> {
    let mut out = AngularField::zero();
    for (k, t) in terms.iter().enumerate() {
        let f = match (t.l, t.sin_pow, t.cos_pow) {
            (Some(l), None, None) => AngularField::harmonic(l, t.m, t.time.clone())
                .map_err(|e| CliError::Config(format!("{name}[{k}]: {e}")))?,
            (Some(_), _, _) => {
                return Err(CliError::Config(format!(
                    "{name}[{k}]: give either `l` or `sin_pow`/`cos_pow`, not both"
                )))
            }
            (None, s, c) => {
                AngularField::monomial(t.time.clone(), s.unwrap_or(0), c.unwrap_or(0), t.m)
            }
        };
        out = out.plus(f);
    }
    Ok(out)
}

fn check_ladder(name: &str, radii: &[f64], min: usize) -> Result<()> {
    if radii.len() < min {
        return Err(CliError::Config(format!(
            "{name}: need at least {min} radii, got {}",
            radii.len()
        )));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(CliError::Config(format!(
            "{name}: radius {r} is not positive"
        )));
    }
    if let Some(w) = radii.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!(
            "{name}: ladder must be strictly increasing, but {} is followed by {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::Config(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Apply overrides and defaults, then validate.
pub fn resolve(raw: RawConfig, over: &Overrides) -> Result<ScenarioConfig> {
    if let Some(v) = raw.schema_version {
        if v != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {v} is not supported (expected {SCHEMA_VERSION})"
            )));
        }
    }
    let mut d = Defaults(Vec::new());
    let name = over
        .preset
        .clone()
        .or(raw.preset.clone())
        .ok_or_else(|| CliError::Config("missing `preset`".into()))?;
    let preset = Preset::parse(&name)?;

    let given = [
        ("m", raw.parameters.m),
        ("a", raw.parameters.a),
        ("alpha", raw.parameters.alpha),
        ("u_null", raw.parameters.u_null),
    ];
    let allowed = preset.parameters();
    for (key, v) in given {
        if v.is_some() && !allowed.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!(
                "parameters.{key} is not used by preset `{name}`"
            )));
        }
    }
    let mut param = |key: &str| {
        let v = given.iter().find(|(k, _)| *k == key).and_then(|(_, v)| *v);
        let default = allowed.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        match default {
            Some(def) => d.take(&format!("parameters.{key}"), v, def),
            None => f64::NAN,
        }
    };
    let parameters = Parameters {
        m: param("m"),
        a: param("a"),
        alpha: param("alpha"),
        u_null: param("u_null"),
    };
    for (key, v) in [
        ("m", parameters.m),
        ("u_null", parameters.u_null),
        ("alpha", parameters.alpha),
        ("a", parameters.a),
    ] {
        if !v.is_nan() && !v.is_finite() {
            return Err(CliError::Config(format!("parameters.{key} must be finite")));
        }
    }
    if matches!(
        preset,
        Preset::Schwarzschild | Preset::Kerr | Preset::BondiSchwarzschild
    ) && parameters.m <= 0.0
    {
        return Err(CliError::Config(format!(
            "parameters.m must be positive for `{name}`"
        )));
    }
    if preset == Preset::Kerr {
        charges_core::spacetimes::KerrParameters::new(parameters.m, parameters.a)
            .map_err(|e| CliError::Config(format!("parameters: {e}")))?;
        // the exterior slice needs a horizon to sit outside of
        if parameters.a.abs() >= parameters.m {
            return Err(CliError::Config(format!(
                "parameters: kerr needs |a| < m, got m = {}, a = {}",
                parameters.m, parameters.a
            )));
        }
    }

    let has_bondi_sections = raw.news.c.is_some()
        || raw.news.d.is_some()
        || raw.coefficients.big_c.is_some()
        || raw.coefficients.big_h.is_some()
        || raw.coefficients.mass.is_some()
        || raw.coefficients.n.is_some()
        || raw.coefficients.p.is_some()
        || raw.slice.a3.is_some()
        || raw.slice.a4.is_some();
    let base = match preset {
        Preset::Minkowski | Preset::BondiCustom => Some(BondiExpansion::default()),
        Preset::Schwarzschild | Preset::Kerr => None,
        Preset::BondiSchwarzschild => Some(BondiExpansion::schwarzschild(parameters.m)),
        Preset::BondiQuadrupole => Some(quadrupole(
            parameters.alpha,
            parameters.u_null,
            parameters.m,
        )),
        Preset::BondiBiaxial => Some(biaxial()),
        Preset::BondiVanishingNews => Some(vanishing_news(parameters.u_null, parameters.m)),
    };
    if has_bondi_sections && !(preset.is_bondi() && preset != Preset::Minkowski) {
        return Err(CliError::Config(format!(
            "[news], [coefficients] and [slice] apply only to bondi-* presets, not `{name}`"
        )));
    }
    let expansion = match base {
        None => None,
        Some(mut e) => {
            let slots: [(&str, &Option<Vec<Term>>, &mut AngularField); 7] = [
                ("news.c", &raw.news.c, &mut e.c),
                ("news.d", &raw.news.d, &mut e.d),
                ("coefficients.C", &raw.coefficients.big_c, &mut e.big_c),
                ("coefficients.H", &raw.coefficients.big_h, &mut e.big_h),
                ("coefficients.M", &raw.coefficients.mass, &mut e.mass),
                ("coefficients.N", &raw.coefficients.n, &mut e.n),
                ("coefficients.P", &raw.coefficients.p, &mut e.p),
            ];
            for (key, terms, slot) in slots {
                if let Some(terms) = terms {
                    *slot = field(terms, key)?;
                }
            }
            Some(e)
        }
    };

    let (u0_default, u1_default) = match preset {
        Preset::BondiBiaxial => (biaxial_slice().u0, 10.0),
        Preset::BondiVanishingNews => (parameters.u_null, 0.0),
        _ => (0.0, 10.0),
    };
    let time = TimeRange {
        u0: d.take("time.u0", over.u0.or(raw.time.u0), u0_default),
        u1: d.take("time.u1", over.u1.or(raw.time.u1), u1_default),
        du: d.take("time.du", over.du.or(raw.time.du), 0.01),
    };
    check_positive("time.du", time.du)?;
    if !(time.u0.is_finite() && time.u1.is_finite()) || time.u0 == time.u1 {
        return Err(CliError::Config(format!(
            "time.u0 = {} and time.u1 = {} must be distinct and finite",
            time.u0, time.u1
        )));
    }

    let slice = SliceSpec {
        u0: time.u0,
        a3: match &raw.slice.a3 {
            Some(t) => field(t, "slice.a3")?,
            None if preset == Preset::BondiBiaxial => biaxial_slice().a3,
            None => AngularField::zero(),
        },
        a4: match &raw.slice.a4 {
            Some(t) => field(t, "slice.a4")?,
            None => AngularField::zero(),
        },
    };

    if let Some(e) = &expansion {
        let (lo, hi) = time.span();
        let named = [
            ("news.c", &e.c),
            ("news.d", &e.d),
            ("coefficients.C", &e.big_c),
            ("coefficients.H", &e.big_h),
            ("coefficients.M", &e.mass),
            ("coefficients.N", &e.n),
            ("coefficients.P", &e.p),
        ];
        for (key, f) in named {
            if let Some((a, b)) = f.time_range() {
                if lo < a || hi > b {
                    return Err(CliError::Config(format!(
                        "{key}: time table covers [{a}, {b}] but the run needs [{lo}, {hi}]"
                    )));
                }
            }
        }
        if raw.news.c.is_some() {
            let rep = condition_b(&e.c, &time.samples(21));
            if !rep.passed {
                return Err(CliError::Config(format!(
                    "news.c violates condition_b: |∫c dψ| = {:e} > {:e} at u = {}, θ = {}",
                    rep.max_violation, rep.tolerance, rep.worst.0, rep.worst.1
                )));
            }
            log::info!(
                "news.c satisfies condition_b (max ring integral {:e})",
                rep.max_violation
            );
        }
    }

    let n_theta = d.take(
        "grid.n_theta",
        over.n_theta.or(raw.grid.n_theta),
        DEFAULT_N_THETA,
    );
    let n_psi = d.take("grid.n_psi", over.n_psi.or(raw.grid.n_psi), DEFAULT_N_PSI);
    SphereGrid::new(n_theta, n_psi).map_err(|e| CliError::Config(format!("grid: {e}")))?;
    let radii = d.take_vec(
        "grid.radii",
        over.radii.clone().or(raw.grid.radii),
        &DEFAULT_RADII,
    );
    check_ladder("grid.radii", &radii, 3)?;
    let consistency_radii = d.take_vec(
        "grid.consistency_radii",
        raw.grid.consistency_radii,
        &charges_core::bondi::slice::CONSISTENCY_RADII,
    );
    check_ladder("grid.consistency_radii", &consistency_radii, 4)?;

    let base_tol = Tolerances::default();
    let t = &raw.tolerances;
    let tolerances = Tolerances {
        dec: d.take("tolerances.dec", t.dec, base_tol.dec),
        pmt: d.take("tolerances.pmt", t.pmt, base_tol.pmt),
        mass_loss: d.take("tolerances.mass_loss", t.mass_loss, base_tol.mass_loss),
        holder: d.take("tolerances.holder", t.holder, base_tol.holder),
        positivity: d.take("tolerances.positivity", t.positivity, base_tol.positivity),
        decay_gate: d.take("tolerances.decay_gate", t.decay_gate, base_tol.decay_gate),
        consistency_order: d.take(
            "tolerances.consistency_order",
            t.consistency_order,
            base_tol.consistency_order,
        ),
        scale: 1.0,
    };
    for (key, v) in [
        ("tolerances.dec", tolerances.dec),
        ("tolerances.pmt", tolerances.pmt),
        ("tolerances.mass_loss", tolerances.mass_loss),
        ("tolerances.holder", tolerances.holder),
        ("tolerances.positivity", tolerances.positivity),
        ("tolerances.decay_gate", tolerances.decay_gate),
        ("tolerances.consistency_order", tolerances.consistency_order),
    ] {
        check_positive(key, v)?;
    }
    let scale = over.tolerance_scale.unwrap_or(1.0);
    check_positive("--tolerance-scale", scale)?;

    Ok(ScenarioConfig {
        id: raw.id.unwrap_or_else(|| name.clone()),
        preset,
        parameters,
        expansion,
        slice,
        n_theta,
        n_psi,
        radii,
        consistency_radii,
        time,
        tolerances: tolerances.scaled(scale),
        defaulted: d.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        parse_config(text).unwrap_err().to_string()
    }

    #[test]
    fn preset_only() {
        let c = parse_config("preset = \"schwarzschild\"").unwrap();
        assert_eq!(c.parameters.m, 1.0);
        assert_eq!((c.n_theta, c.n_psi), (48, 96));
        assert_eq!(c.radii, DEFAULT_RADII.to_vec());
        assert!(c.defaulted.iter().any(|s| s.starts_with("grid.radii")));
        assert!(c.expansion.is_none());
    }

    #[test]
    fn ladders_must_increase() {
        let e = err("preset = \"schwarzschild\"\n[grid]\nradii = [80.0, 40.0, 20.0]");
        assert!(e.contains("strictly increasing"), "{e}");
    }

    #[test]
    fn unknown_keys_and_presets() {
        assert!(err("preset = \"kerr\"\nmas = 1").contains("unknown field"));
        assert!(err("preset = \"kerr\"\n[parameters]\nmass = 1.0").contains("unknown field"));
        assert!(err("preset = \"vaidya\"").contains("unknown preset"));
        assert!(err("preset = \"schwarzschild\"\n[parameters]\nalpha = 0.1").contains("not used"));
        assert!(err("preset = \"kerr\"\n[parameters]\na = 2.0").contains("parameters"));
        assert!(err("preset = \"kerr\"\n[tolerances]\ndec = -1.0").contains("tolerances.dec"));
        assert!(err("schema_version = 2\npreset = \"kerr\"").contains("schema_version"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = err("preset = \"kerr\"\n\n[grid]\nn_theta = \"many\"\n");
        assert!(e.contains("line 4"), "{e}");
    }

    #[test]
    fn news_sections_need_bondi_presets() {
        let e = err("preset = \"kerr\"\n[[news.c]]\nsin_pow = 2\ntime = [0.0, 1.0]");
        assert!(e.contains("bondi-*"), "{e}");
    }

    #[test]
    fn harmonic_news_is_checked_at_the_poles() {
        let ok =
            parse_config("preset = \"bondi-custom\"\n[[news.c]]\nl = 2\nm = 2\ntime = [0.0, 0.1]")
                .unwrap();
        assert!(!ok.expansion.unwrap().c.is_zero());
        let e = err("preset = \"bondi-custom\"\n[[news.c]]\nl = 2\nm = 0\ntime = [0.0, 0.1]");
        assert!(e.contains("condition_b"), "{e}");
    }

    #[test]
    fn tables_must_cover_the_run() {
        let text = "preset = \"bondi-custom\"\n[time]\nu0 = 0.0\nu1 = 5.0\n[[news.d]]\nl = 2\nm = 1\ntime = { u = [0.0, 1.0, 2.0, 3.0, 4.0], values = [0.0, 0.1, 0.2, 0.3, 0.4] }";
        assert!(err(text).contains("covers [0, 4]"));
        let ok = text.replace("u1 = 5.0", "u1 = 4.0");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn overrides_win() {
        let raw = RawConfig::from_toml("preset = \"bondi-quadrupole\"\n[time]\ndu = 0.5").unwrap();
        let c = resolve(
            raw,
            &Overrides {
                du: Some(0.25),
                radii: Some(vec![5.0, 10.0, 20.0]),
                tolerance_scale: Some(10.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.time.du, 0.25);
        assert_eq!(c.radii, vec![5.0, 10.0, 20.0]);
        assert_eq!(c.tolerances.mass_loss, 1e-8);
        assert_eq!(c.tolerances.consistency_order, 3.3);
    }
}
