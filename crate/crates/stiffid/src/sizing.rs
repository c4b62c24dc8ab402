//! Cantilever sizing of the holding fixture / workpiece assembly.
//!
//! Tip deflection of a clamped circular shaft under a tip force:
//! δ = P·L³ / (3·E·I) with I = π·D⁴/64. Inputs stay in the workshop
//! units (N, mm, N/mm²); the reported stiffness is converted to N/m.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BeamError {
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("length range is empty or step is not positive")]
    BadRange,
}

/// Cantilever under tip load. The Young modulus is a required input:
/// steel is 2.1e5 N/mm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// Tip force (N).
    pub force_n: f64,
    /// Free length (mm).
    pub length_mm: f64,
    /// Young modulus (N/mm²).
    pub young_n_mm2: f64,
    /// Shaft diameter (mm).
    pub diameter_mm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deflection {
    /// Second moment of area (mm⁴).
    pub inertia_mm4: f64,
    /// Tip deflection (mm).
    pub deflection_mm: f64,
    /// Flexural stiffness P/δ (N/m).
    pub stiffness_n_per_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length_mm: f64,
    pub deflection_mm: f64,
    pub stiffness_n_per_m: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<(), BeamError> {
        for (field, value) in [
            ("force_n", self.force_n),
            ("length_mm", self.length_mm),
            ("young_n_mm2", self.young_n_mm2),
            ("diameter_mm", self.diameter_mm),
        ] {
            if value <= 0.0 || !value.is_finite() {
                return Err(BeamError::NonPositive { field, value });
            }
        }
        Ok(())
    }
}

/// Tip deflection and flexural stiffness of the beam.
pub fn deflection(spec: &BeamSpec) -> Result<Deflection, BeamError> {
    spec.validate()?;
    let inertia = std::f64::consts::PI * spec.diameter_mm.powi(4) / 64.0;
    let delta = spec.force_n * spec.length_mm.powi(3) / (3.0 * spec.young_n_mm2 * inertia);
    // N/mm → N/m
    let stiffness = spec.force_n / delta * 1e3;
    Ok(Deflection {
        inertia_mm4: inertia,
        deflection_mm: delta,
        stiffness_n_per_m: stiffness,
    })
}

/// Deflection/stiffness trade-off over a range of lengths (inclusive
/// of both ends when the step lands on them).
pub fn sweep_lengths(
    template: &BeamSpec,
    lo_mm: f64,
    hi_mm: f64,
    step_mm: f64,
) -> Result<Vec<SweepRow>, BeamError> {
    if step_mm <= 0.0 || step_mm.is_nan() || lo_mm > hi_mm || !lo_mm.is_finite() || !hi_mm.is_finite() {
        return Err(BeamError::BadRange);
    }
    let mut rows = Vec::new();
    let mut k = 0u32;
    loop {
        let length = lo_mm + step_mm * k as f64;
        if length > hi_mm * (1.0 + 1e-12) {
            break;
        }
        let spec = BeamSpec { length_mm: length, ..*template };
        let d = deflection(&spec)?;
        rows.push(SweepRow {
            length_mm: length,
            deflection_mm: d.deflection_mm,
            stiffness_n_per_m: d.stiffness_n_per_m,
        });
        k += 1;
    }
    Ok(rows)
}
