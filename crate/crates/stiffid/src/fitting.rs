//! Charge/discharge series reduction.
//!
//! Loading and unloading trace two distinct straight lines (friction and
//! assembly deviations open a hysteresis loop). For each load level the
//! midpoint of the charge value A and discharge value B is taken; the
//! least-squares line through those midpoints carries the slope used as
//! the "real" compliance, and its residuals feed the per-entry error
//! matrix.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("all abscissa values coincide; a line fit is undefined")]
    DegenerateAbscissa,
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("forces are not strictly monotone within the {phase:?} phase")]
    NonMonotone { phase: Phase },
    #[error("charge/discharge force grids differ at levels {levels:?}")]
    LevelMismatch { levels: Vec<f64> },
    #[error("full scale is zero but residuals are not")]
    ZeroScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Charge,
    Discharge,
}

/// One measured loading (or unloading) branch: ordered (force, value)
/// samples with strictly monotone forces.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargePath {
    points: Vec<(f64, f64)>,
    pub phase: Phase,
}

impl ChargePath {
    pub fn new(points: Vec<(f64, f64)>, phase: Phase) -> Result<Self, FitError> {
        if points.len() < 2 {
            return Err(FitError::TooFewPoints { min: 2, got: points.len() });
        }
        let increasing = points.windows(2).all(|w| w[1].0 > w[0].0);
        let decreasing = points.windows(2).all(|w| w[1].0 < w[0].0);
        if !increasing && !decreasing {
            return Err(FitError::NonMonotone { phase });
        }
        Ok(ChargePath { points, phase })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Points sorted by ascending force (for grid pairing).
    fn sorted_points(&self) -> Vec<(f64, f64)> {
        let mut p = self.points.clone();
        p.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        p
    }
}

/// Ordinary least-squares line and midline diagnostics for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidlineFit {
    /// Value change per newton.
    pub slope: f64,
    pub intercept: f64,
    /// Signed residual of each midpoint against the fitted line,
    /// in force order.
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
    /// Hysteresis half-width |A−B|/2 per load level (the full segment AB
    /// is twice the friction/deviation effect).
    pub half_widths: Vec<f64>,
    /// Force levels the fit was evaluated at.
    pub levels: Vec<f64>,
    /// Midpoint values C = (A+B)/2 per level.
    pub midpoints: Vec<f64>,
}

/// Least-squares line through `(force, value)` samples.
///
/// Returns `(slope, intercept, rms_residual)` with
/// `rms_residual = sqrt(Σr²/n)`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64), FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints { min: 2, got: points.len() });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let x_scale = points.iter().map(|p| p.0.abs()).fold(0.0f64, f64::max).max(1.0);
    if sxx <= (f64::EPSILON * x_scale * n).powi(2) {
        return Err(FitError::DegenerateAbscissa);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

/// Force grids must match exactly (within `tol` newtons) after averaging;
/// the protocol loads and unloads over the same levels, so no
/// interpolation is performed.
pub const LEVEL_TOL: f64 = 1e-6;

/// Midline construction: C = (A+B)/2 per shared load level, then a
/// least-squares line through the C points.
pub fn midline(charge: &ChargePath, discharge: &ChargePath) -> Result<MidlineFit, FitError> {
    let a = charge.sorted_points();
    let b = discharge.sorted_points();
    if a.len() != b.len() {
        let extra: Vec<f64> = if a.len() > b.len() {
            a.iter().skip(b.len()).map(|p| p.0).collect()
        } else {
            b.iter().skip(a.len()).map(|p| p.0).collect()
        };
        return Err(FitError::LevelMismatch { levels: extra });
    }
    let mismatched: Vec<f64> = a
        .iter()
        .zip(&b)
        .filter(|(pa, pb)| (pa.0 - pb.0).abs() > LEVEL_TOL)
        .map(|(pa, _)| pa.0)
        .collect();
    if !mismatched.is_empty() {
        return Err(FitError::LevelMismatch { levels: mismatched });
    }

    let levels: Vec<f64> = a.iter().map(|p| p.0).collect();
    let midpoints: Vec<f64> = a.iter().zip(&b).map(|(pa, pb)| (pa.1 + pb.1) / 2.0).collect();
    let half_widths: Vec<f64> = a.iter().zip(&b).map(|(pa, pb)| (pa.1 - pb.1).abs() / 2.0).collect();

    let pts: Vec<(f64, f64)> = levels.iter().copied().zip(midpoints.iter().copied()).collect();
    let (slope, intercept, rms) = fit_line(&pts)?;
    let residuals = pts.iter().map(|&(x, y)| y - (slope * x + intercept)).collect();

    Ok(MidlineFit {
        slope,
        intercept,
        residuals,
        rms_residual: rms,
        half_widths,
        levels,
        midpoints,
    })
}

/// Fit error as a percentage of the series full scale (largest |C|).
pub fn error_percent(fit: &MidlineFit, full_scale: f64) -> Result<f64, FitError> {
    if full_scale == 0.0 {
        if fit.rms_residual == 0.0 {
            return Ok(0.0);
        }
        return Err(FitError::ZeroScale);
    }
    Ok(100.0 * fit.rms_residual / full_scale)
}

/// Full scale of a midline fit: the largest midpoint magnitude.
pub fn full_scale(fit: &MidlineFit) -> f64 {
    fit.midpoints.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
