//! Command-line runner: scenario configuration, the check suite,
//! convergence studies and report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{resolve, Overrides, RawConfig};
use error::{CliError, Result};
use report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "charges",
    version,
    about = "Energy-momentum charges at spatial and null infinity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// ADM energy-momentum, dominant energy condition and positivity margin.
    Adm,
    /// Null-infinity charges, positivity margin and decay orders.
    Null,
    /// Bondi energy-momentum along retarded time; writes the trajectory CSV.
    BondiEvolve,
    /// Induced slice data: closed-form consistency and null charges.
    BondiSlice,
    /// The full built-in property battery.
    Verify,
    /// Grid and radius-ladder refinement study.
    Converge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Adm => "adm",
            Command::Null => "null",
            Command::BondiEvolve => "bondi-evolve",
            Command::BondiSlice => "bondi-slice",
            Command::Verify => "verify",
            Command::Converge => "converge",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Preset to run instead of (or overriding) the file's.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// JSON report destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tabular output destination.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ntheta: Option<usize>,
    #[arg(long, global = true)]
    pub npsi: Option<usize>,
    /// Comma-separated radius ladder.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub radii: Option<Vec<f64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub u1: Option<f64>,
    #[arg(long, global = true)]
    pub du: Option<f64>,
    /// Treat extrapolation warnings as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Multiplies every absolute tolerance.
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
}

/// A finished run: the report and optional CSV text.
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

fn overrides(opts: &Options) -> Overrides {
    Overrides {
        preset: opts.preset.clone(),
        n_theta: opts.ntheta,
        n_psi: opts.npsi,
        radii: opts.radii.clone(),
        u0: opts.u0,
        u1: opts.u1,
        du: opts.du,
        tolerance_scale: opts.tolerance_scale,
    }
}

/// Load, override and validate the scenario for a run.
pub fn load_config(opts: &Options) -> Result<config::ScenarioConfig> {
    let raw = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            RawConfig::from_toml(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?
        }
        None => RawConfig::default(),
    };
    resolve(raw, &overrides(opts))
}

/// Run one subcommand without touching the filesystem beyond the config.
pub fn execute(command: Command, opts: &Options) -> Result<Outcome> {
    let start = Instant::now();
    let (scenario, cfg, out) = if command == Command::Verify {
        if opts.config.is_some() || opts.preset.is_some() {
            return Err(CliError::Usage(
                "verify runs the built-in battery and takes no scenario".into(),
            ));
        }
        let scale = opts.tolerance_scale.unwrap_or(1.0);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(CliError::Config(format!(
                "--tolerance-scale must be positive and finite, got {scale}"
            )));
        }
        ("battery".to_string(), None, verify::verify(scale)?)
    } else {
        let cfg = load_config(opts)?;
        let out = match command {
            Command::Adm => commands::adm(&cfg, opts.strict)?,
            Command::Null => commands::null(&cfg, opts.strict)?,
            Command::BondiEvolve => commands::bondi_evolve(&cfg)?,
            Command::BondiSlice => commands::bondi_slice(&cfg, opts.strict)?,
            Command::Converge => commands::converge(&cfg)?,
            Command::Verify => unreachable!(),
        };
        (cfg.id.clone(), Some(cfg), out)
    };
    let mut report = Report::new(command.name(), scenario, cfg, out.results, out.checks);
    report.metadata.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(Outcome {
        report,
        csv: out.csv,
    })
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Run and write every artifact; returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match execute(cli.command, &cli.opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let json = outcome.report.to_json();
    let written = match &cli.opts.out {
        Some(path) => write(path, &json),
        None => {
            println!("{json}");
            Ok(())
        }
    }
    .and_then(|_| match (&cli.opts.csv, &outcome.csv) {
        (Some(path), Some(text)) => write(path, text),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let r = &outcome.report;
    for c in r.failing() {
        eprintln!(
            "check failed: {} ({:e} {} {:e})",
            c.name,
            c.value,
            if c.relation == report::Relation::AtMost {
                "<="
            } else {
                ">="
            },
            c.threshold
        );
    }
    eprintln!(
        "{} {}: {}/{} checks passed",
        r.command,
        r.scenario,
        r.checks.iter().filter(|c| c.passed).count(),
        r.checks.len()
    );
    if r.passed {
        0
    } else {
        1
    }
}

/// Size the worker pool from `CHARGES_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("CHARGES_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "CHARGES_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("CHARGES_THREADS: {e}")))
}
