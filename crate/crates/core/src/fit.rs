//! Radial extrapolation of surface integrals and decay-rate fits.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Sup-norms below this are treated as identically zero.
pub const EXACT_ZERO_FLOOR: f64 = 1e-13;

/// Result of fitting `A + B/r + C/r²` to per-radius samples.
#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    pub radii: Vec<f64>,
    pub samples: Vec<f64>,
    /// Limit `A` as `r → ∞`.
    pub limit: f64,
    pub coefficients: [f64; 3],
    /// RMS of the fit residuals (zero when the fit interpolates).
    pub residual: f64,
    /// Estimated uncertainty of the limit: the larger of the fit residual and
    /// the change in `A` when the innermost rung is dropped.
    pub uncertainty: f64,
    /// Samples move non-monotonically by more than the residual.
    pub divergence_warning: bool,
}

fn validate_ladder(radii: &[f64], min: usize) -> Result<()> {
    if radii.len() < min {
        return Err(Error::Usage(format!(
            "radius ladder needs at least {min} rungs, got {}",
            radii.len()
        )));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Usage("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage(
            "radius ladder must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn fit_inverse_powers(radii: &[f64], samples: &[f64]) -> [f64; 3] {
    let n = radii.len();
    let cols = 3.min(n);
    let a = DMatrix::from_fn(n, cols, |i, j| radii[i].powi(-(j as i32)));
    let b = DVector::from_column_slice(samples);
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).expect("SVD solve with both factors");
    let mut out = [0.0; 3];
    out[..cols].copy_from_slice(x.as_slice());
    out
}

/// Least-squares extrapolation of `samples(r)` to `r → ∞`.
pub fn extrapolate(radii: &[f64], samples: &[f64]) -> Result<Extrapolation> {
    validate_ladder(radii, 3)?;
    if samples.len() != radii.len() {
        return Err(Error::Usage("one sample per radius required".into()));
    }
    let coefficients = fit_inverse_powers(radii, samples);
    let model = |r: f64| coefficients[0] + coefficients[1] / r + coefficients[2] / (r * r);
    let sq: f64 = radii
        .iter()
        .zip(samples)
        .map(|(&r, &s)| (s - model(r)).powi(2))
        .sum();
    let residual = (sq / radii.len() as f64).sqrt();
    let uncertainty = if radii.len() > 3 {
        let sub = fit_inverse_powers(&radii[1..], &samples[1..]);
        residual.max((sub[0] - coefficients[0]).abs())
    } else {
        residual
    };
    let diffs: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = samples
        .iter()
        .fold(0.0f64, |m, s| m.max(s.abs()))
        .max(1e-300);
    let divergence_warning = diffs.windows(2).any(|w| {
        w[0] * w[1] < 0.0
            && w[0].abs().min(w[1].abs()) > residual.max(1e-10 * scale).max(EXACT_ZERO_FLOOR)
    });
    Ok(Extrapolation {
        radii: radii.to_vec(),
        samples: samples.to_vec(),
        limit: coefficients[0],
        coefficients,
        residual,
        uncertainty,
        divergence_warning,
    })
}

/// Fitted power-law decay `|f| ~ K r^(-τ)`.
#[derive(Debug, Clone, Serialize)]
pub enum DecayFit {
    /// Every sample below [`EXACT_ZERO_FLOOR`].
    ExactZero,
    Power {
        exponent: f64,
        residual: f64,
        /// Number of rungs above the zero floor used in the fit.
        rungs_used: usize,
    },
}

impl Default for DecayFit {
    fn default() -> Self {
        DecayFit::ExactZero
    }
}

impl DecayFit {
    /// Exponent, with exact zeros reported as `+∞`.
    pub fn exponent(&self) -> f64 {
        match self {
            DecayFit::ExactZero => f64::INFINITY,
            DecayFit::Power { exponent, .. } => *exponent,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, DecayFit::ExactZero)
    }
}

/// Log–log slope of sup-norms against radius.
///
/// Samples that fall below the zero floor are dropped; if fewer than two
/// remain the quantity counts as identically zero.
pub fn decay_exponent(radii: &[f64], norms: &[f64]) -> Result<DecayFit> {
    validate_ladder(radii, 2)?;
    if norms.len() != radii.len() {
        return Err(Error::Usage("one norm per radius required".into()));
    }
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(norms)
        .filter(|(_, &n)| n > EXACT_ZERO_FLOOR)
        .map(|(&r, &n)| (r.ln(), n.ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(DecayFit::ExactZero);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit::Power {
        exponent: -slope,
        residual,
        rungs_used: pts.len(),
    })
}
