//! Measurement campaign parsing and conversion of raw transducer
//! readings and load steps into twist/wrench pairs.
//!
//! Two displacement transducers sit symmetrically on each of the three
//! measurement directions, a distance `a` apart. For a pair reading
//! `(m_i, m_j)` the translation along the measured axis is the mean
//! `(m_i + m_j)/2` and the rotation about `separation × measure` is the
//! difference quotient `(m_j − m_i)/a`. Assembling the three pairs and
//! solving two 3x3 systems yields the full small-displacement torsor.

mod schema;

pub use schema::{CampaignFile, CaseFile, PairFile, ReadingsUm, SensorConfigFile, StepFile};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorCategory;
use crate::fitting::Phase;
use crate::torsor::{wrench_from_point_force, Mat3, Point3, Twist, Vec3, Wrench};

/// Condition-number ceiling above which a sensor layout or load set is
/// treated as rank deficient.
pub const RANK_COND_LIMIT: f64 = 1e8;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("I/O error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("CSV error in {path}: {message}")]
    Csv { path: String, message: String },
}

impl IngestError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            IngestError::Io { .. } => ErrorCategory::Io,
            _ => ErrorCategory::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockId {
    /// Block Tool: tool, tool-holder, dynamometer, cross-slide plate.
    Bt,
    /// Block Workpiece: workpiece, holding fixture, spindle.
    Bw,
}

/// One transducer pair: where it measures, how the two sensors are
/// separated, and which reading slots it owns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorPair {
    /// Unit direction the pair measures displacement along.
    pub measure_axis: Vec3,
    /// Unit direction from sensor `i` to sensor `j`; perpendicular to
    /// `measure_axis`.
    pub separation_axis: Vec3,
    /// Sensor spacing `a` (m), > 0.
    pub spacing: f64,
    /// Zero-based indices of the pair's two readings among the six.
    pub sensors: (usize, usize),
}

impl SensorPair {
    /// Axis the pair's difference reading rotates about.
    pub fn rotation_axis(&self) -> Vec3 {
        self.separation_axis.cross(self.measure_axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub pairs: [SensorPair; 3],
    /// Reference point the assembled twist is expressed at (m).
    pub expressed_at: Point3,
}

/// Six transducer readings, in meters, ordered m1..m6.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadingSet(pub [f64; 6]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadStep {
    /// Applied force magnitude (N), ≥ 0.
    pub force: f64,
    /// Unit force direction.
    pub direction: Vec3,
    /// Load application point (m, relative to the cube center).
    pub applied_at: Point3,
    pub phase: Phase,
    pub readings: ReadingSet,
    /// Per-sensor standard deviation over the averaged repetitions (m).
    pub readings_std: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    pub label: String,
    pub steps: Vec<LoadStep>,
}

impl LoadCase {
    /// Shared (direction, applied point) of all steps; validation
    /// guarantees consistency within a case.
    pub fn geometry(&self) -> (Vec3, Point3) {
        let s = &self.steps[0];
        (s.direction, s.applied_at)
    }

    /// Wrench of a 1 N load along the case direction, expressed at `at`.
    pub fn unit_wrench(&self, at: Point3) -> Wrench {
        let (dir, point) = self.geometry();
        wrench_from_point_force(dir, point, at)
    }

    pub fn steps_in_phase(&self, phase: Phase) -> impl Iterator<Item = &LoadStep> {
        self.steps.iter().filter(move |s| s.phase == phase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub block: BlockId,
    pub sensor_config: SensorConfig,
    pub cases: Vec<LoadCase>,
    pub repetitions: u32,
}

impl SensorConfig {
    /// Default layout: pairs measure x, y, z, separated along y, z, x,
    /// spaced 0.1 m, readings (m1,m2), (m3,m4), (m5,m6). The exact
    /// bench layout is campaign-specific and overrides this.
    pub fn default_layout() -> Self {
        SensorConfig {
            pairs: [
                SensorPair {
                    measure_axis: Vec3::X,
                    separation_axis: Vec3::Y,
                    spacing: 0.1,
                    sensors: (0, 1),
                },
                SensorPair {
                    measure_axis: Vec3::Y,
                    separation_axis: Vec3::Z,
                    spacing: 0.1,
                    sensors: (2, 3),
                },
                SensorPair {
                    measure_axis: Vec3::Z,
                    separation_axis: Vec3::X,
                    spacing: 0.1,
                    sensors: (4, 5),
                },
            ],
            expressed_at: Point3::ORIGIN,
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        let mut seen = [false; 6];
        for (k, pair) in self.pairs.iter().enumerate() {
            if pair.spacing <= 0.0 || !pair.spacing.is_finite() {
                return Err(IngestError::Geometry(format!(
                    "pair {k}: sensor spacing must be positive, got {}",
                    pair.spacing
                )));
            }
            for axis in [pair.measure_axis, pair.separation_axis] {
                if !axis.is_finite() || (axis.norm() - 1.0).abs() > 1e-6 {
                    return Err(IngestError::Geometry(format!(
                        "pair {k}: axes must be finite unit vectors"
                    )));
                }
            }
            if pair.measure_axis.dot(pair.separation_axis).abs() >= 1e-6 {
                return Err(IngestError::Geometry(format!(
                    "pair {k}: measure and separation axes are not perpendicular"
                )));
            }
            for s in [pair.sensors.0, pair.sensors.1] {
                if s >= 6 {
                    return Err(IngestError::Geometry(format!(
                        "pair {k}: sensor index {} out of range 1..=6",
                        s + 1
                    )));
                }
                if seen[s] {
                    return Err(IngestError::Geometry(format!(
                        "sensor index {} assigned twice",
                        s + 1
                    )));
                }
                seen[s] = true;
            }
        }
        if !self.expressed_at.is_finite() {
            return Err(IngestError::Geometry("expressed_at is not finite".into()));
        }
        // both 3x3 solves must be well posed: the measure axes span 3D
        // and so do the pair rotation axes
        if self.translation_matrix().condition_1norm() > RANK_COND_LIMIT {
            return Err(IngestError::Geometry(
                "measure axes do not span 3D space".into(),
            ));
        }
        if self.rotation_matrix().condition_1norm() > RANK_COND_LIMIT {
            return Err(IngestError::Geometry(
                "pair rotation axes do not span 3D space; some twist rotation is unobservable"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Rows are the pair measure axes.
    fn translation_matrix(&self) -> Mat3 {
        Mat3::from_rows(
            self.pairs[0].measure_axis,
            self.pairs[1].measure_axis,
            self.pairs[2].measure_axis,
        )
    }

    /// Rows are the pair rotation axes.
    fn rotation_matrix(&self) -> Mat3 {
        Mat3::from_rows(
            self.pairs[0].rotation_axis(),
            self.pairs[1].rotation_axis(),
            self.pairs[2].rotation_axis(),
        )
    }
}

/// Assembles the six readings into the small-displacement torsor at the
/// configured reference point.
pub fn readings_to_twist(r: &ReadingSet, cfg: &SensorConfig) -> Twist {
    let mut mean = Vec3::ZERO;
    let mut diff = Vec3::ZERO;
    for (k, pair) in cfg.pairs.iter().enumerate() {
        let mi = r.0[pair.sensors.0];
        let mj = r.0[pair.sensors.1];
        let m = (mi + mj) / 2.0;
        let theta = (mj - mi) / pair.spacing;
        match k {
            0 => {
                mean.x = m;
                diff.x = theta;
            }
            1 => {
                mean.y = m;
                diff.y = theta;
            }
            _ => {
                mean.z = m;
                diff.z = theta;
            }
        }
    }
    // translation solves  measure_axisᵀ ε = mean_k,
    // rotation solves     rotation_axisᵀ ρ = diff_k
    let translation = cfg
        .translation_matrix()
        .solve(mean)
        .expect("validated sensor config has spanning measure axes");
    let rotation = cfg
        .rotation_matrix()
        .solve(diff)
        .expect("validated sensor config has spanning rotation axes");
    Twist::new(rotation, translation, cfg.expressed_at)
}

/// Mechanical action torsor of a load step at `expressed_at`.
pub fn step_to_wrench(s: &LoadStep, expressed_at: Point3) -> Wrench {
    wrench_from_point_force(s.direction * s.force, s.applied_at, expressed_at)
}

impl Campaign {
    pub fn validate(&self) -> Result<(), IngestError> {
        self.sensor_config.validate()?;
        if self.repetitions == 0 {
            return Err(IngestError::Schema("repetitions must be >= 1".into()));
        }
        for case in &self.cases {
            if case.steps.is_empty() {
                return Err(IngestError::Schema(format!(
                    "case {:?} has no steps",
                    case.label
                )));
            }
            let charge = case.steps_in_phase(Phase::Charge).count();
            if charge < 2 {
                return Err(IngestError::Schema(format!(
                    "case {:?} needs at least 2 charge steps, got {charge}",
                    case.label
                )));
            }
            let (dir0, at0) = case.geometry();
            for (i, step) in case.steps.iter().enumerate() {
                if step.force < 0.0 || !step.force.is_finite() {
                    return Err(IngestError::Schema(format!(
                        "case {:?} step {i}: force must be finite and >= 0",
                        case.label
                    )));
                }
                if (step.direction.norm() - 1.0).abs() > 1e-6 {
                    return Err(IngestError::Geometry(format!(
                        "case {:?} step {i}: direction is not unit length",
                        case.label
                    )));
                }
                if (step.direction - dir0).norm() > 1e-9 || (step.applied_at - at0).norm() > 1e-9 {
                    return Err(IngestError::Geometry(format!(
                        "case {:?} step {i}: direction/application point differs from the rest of the case",
                        case.label
                    )));
                }
                if step.readings.0.iter().any(|v| !v.is_finite()) {
                    return Err(IngestError::Schema(format!(
                        "case {:?} step {i}: non-finite reading",
                        case.label
                    )));
                }
            }
        }
        self.validate_rank()
    }

    fn validate_rank(&self) -> Result<(), IngestError> {
        match self.block {
            BlockId::Bt => {
                if self.cases.len() != 6 {
                    return Err(IngestError::Rank(format!(
                        "a BT campaign needs 6 load cases to identify the full 6x6 matrix, got {}",
                        self.cases.len()
                    )));
                }
                let cond = self.load_condition();
                if cond > RANK_COND_LIMIT {
                    return Err(IngestError::Rank(format!(
                        "the 6 load-case wrenches do not span 6D (condition {cond:.3e})"
                    )));
                }
            }
            // BW campaigns are schema-valid at any case count; the
            // identifiable shapes (3 translation-only or 6 full) get
            // their span checked here, anything else is rejected at
            // identification time
            BlockId::Bw => match self.cases.len() {
                3 => {
                    let m = Mat3::from_rows(
                        self.cases[0].geometry().0,
                        self.cases[1].geometry().0,
                        self.cases[2].geometry().0,
                    );
                    if m.condition_1norm() > RANK_COND_LIMIT {
                        return Err(IngestError::Rank(
                            "the 3 BW load directions do not span 3D".into(),
                        ));
                    }
                }
                6 => {
                    let cond = self.load_condition();
                    if cond > RANK_COND_LIMIT {
                        return Err(IngestError::Rank(format!(
                            "the 6 load-case wrenches do not span 6D (condition {cond:.3e})"
                        )));
                    }
                }
                _ => {}
            },
        }
        Ok(())
    }

    /// Condition of the stacked unit-wrench matrix (meaningful for
    /// 6-case campaigns).
    pub fn load_condition(&self) -> f64 {
        use crate::torsor::Mat6;
        let at = self.sensor_config.expressed_at;
        let mut cols = [[0.0; 6]; 6];
        for (j, case) in self.cases.iter().take(6).enumerate() {
            cols[j] = case.unit_wrench(at).as_vector();
        }
        Mat6::from_columns(&cols).condition_1norm()
    }
}

/// Parses and validates a campaign file (JSON).
pub fn parse_campaign(path: &std::path::Path) -> Result<Campaign, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_campaign_str(&text)
}

/// Parses and validates a campaign from JSON text.
pub fn parse_campaign_str(text: &str) -> Result<Campaign, IngestError> {
    let file: CampaignFile = serde_json::from_str(text)
        .map_err(|e| IngestError::Schema(e.to_string()))?;
    let campaign = file.into_campaign()?;
    campaign.validate()?;
    Ok(campaign)
}

/// Parses a campaign whose steps come from a raw logger CSV dump
/// (`case,phase,force_daN,m1..m6` with readings in µm). The JSON file
/// supplies the geometry; CSV rows are appended to their cases in file
/// order.
pub fn parse_campaign_with_csv(
    json_path: &std::path::Path,
    csv_path: &std::path::Path,
) -> Result<Campaign, IngestError> {
    let text = std::fs::read_to_string(json_path).map_err(|source| IngestError::Io {
        path: json_path.display().to_string(),
        source,
    })?;
    let mut file: CampaignFile = serde_json::from_str(&text)
        .map_err(|e| IngestError::Schema(e.to_string()))?;
    schema::merge_csv_steps(&mut file, csv_path)?;
    let campaign = file.into_campaign()?;
    campaign.validate()?;
    Ok(campaign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> SensorConfig {
        SensorConfig::default_layout()
    }

    #[test]
    fn equal_readings_are_pure_translation() {
        let c = 3.2e-5;
        let t = readings_to_twist(&ReadingSet([c; 6]), &cfg());
        assert_relative_eq!(t.translation.x, c, max_relative = 1e-12);
        assert_relative_eq!(t.translation.y, c, max_relative = 1e-12);
        assert_relative_eq!(t.translation.z, c, max_relative = 1e-12);
        assert!(t.rotation.norm() < 1e-18);
    }

    #[test]
    fn pure_rotation_from_pair_difference() {
        // pair measuring y, separated along x, on readings 3 and 4
        let config = SensorConfig {
            pairs: [
                SensorPair {
                    measure_axis: Vec3::X,
                    separation_axis: Vec3::Z,
                    spacing: 0.1,
                    sensors: (0, 1),
                },
                SensorPair {
                    measure_axis: Vec3::Y,
                    separation_axis: Vec3::X,
                    spacing: 0.1,
                    sensors: (2, 3),
                },
                SensorPair {
                    measure_axis: Vec3::Z,
                    separation_axis: Vec3::Y,
                    spacing: 0.1,
                    sensors: (4, 5),
                },
            ],
            expressed_at: Point3::ORIGIN,
        };
        config.validate().unwrap();
        let r = ReadingSet([0.0, 0.0, -5e-6, 5e-6, 0.0, 0.0]);
        let t = readings_to_twist(&r, &config);
        // rotation about x̂×ŷ = ẑ of (m4−m3)/a = 1e-4
        assert_relative_eq!(t.rotation.z, 1e-4, max_relative = 1e-12);
        assert!(t.translation.y.abs() < 1e-18);
        assert!(t.rotation.x.abs() < 1e-18);
        assert!(t.rotation.y.abs() < 1e-18);
    }

    #[test]
    fn swapped_sensors_negate_rotation() {
        let mut swapped = cfg();
        swapped.pairs[0].sensors = (1, 0);
        let r = ReadingSet([1e-6, 3e-6, 0.0, 0.0, 0.0, 0.0]);
        let t0 = readings_to_twist(&r, &cfg());
        let t1 = readings_to_twist(&r, &swapped);
        // translation preserved, rotation about the pair axis negated
        assert_relative_eq!(t0.translation.x, t1.translation.x, max_relative = 1e-12);
        let axis0 = cfg().pairs[0].rotation_axis();
        assert_relative_eq!(
            t0.rotation.dot(axis0),
            -t1.rotation.dot(axis0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn degenerate_rotation_axes_rejected() {
        // measure axes span, pairs perpendicular, but rotation axes do not span
        let config = SensorConfig {
            pairs: [
                SensorPair {
                    measure_axis: Vec3::X,
                    separation_axis: Vec3::Y,
                    spacing: 0.1,
                    sensors: (0, 1),
                }, // axis ŷ×x̂ = −ẑ
                SensorPair {
                    measure_axis: Vec3::Y,
                    separation_axis: Vec3::X,
                    spacing: 0.1,
                    sensors: (2, 3),
                }, // axis x̂×ŷ = ẑ
                SensorPair {
                    measure_axis: Vec3::Z,
                    separation_axis: Vec3::X,
                    spacing: 0.1,
                    sensors: (4, 5),
                }, // axis x̂×ẑ = −ŷ
            ],
            expressed_at: Point3::ORIGIN,
        };
        match config.validate() {
            Err(IngestError::Geometry(msg)) => assert!(msg.contains("rotation")),
            other => panic!("expected geometry error, got {other:?}"),
        }
    }

    #[test]
    fn zero_spacing_rejected() {
        let mut config = cfg();
        config.pairs[1].spacing = 0.0;
        assert!(matches!(config.validate(), Err(IngestError::Geometry(_))));
    }

    #[test]
    fn step_wrench_delegates_to_point_force() {
        let step = LoadStep {
            force: 2000.0,
            direction: Vec3::X,
            applied_at: Point3::new(0.0, 0.05, 0.05),
            phase: Phase::Charge,
            readings: ReadingSet([0.0; 6]),
            readings_std: [0.0; 6],
        };
        let w = step_to_wrench(&step, Point3::ORIGIN);
        assert_relative_eq!(w.force.x, 2000.0);
        assert_relative_eq!(w.moment.y, 100.0, max_relative = 1e-15);
        assert_relative_eq!(w.moment.z, -100.0, max_relative = 1e-15);
        // zero lever arm: no moment
        let at_point = step_to_wrench(&step, step.applied_at);
        assert_eq!(at_point.moment, Vec3::ZERO);
    }

    proptest! {
        // readings → twist is linear in the readings
        #[test]
        fn linearity(m1 in proptest::array::uniform6(-1e-4..1e-4f64),
                     m2 in proptest::array::uniform6(-1e-4..1e-4f64),
                     alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
            let config = cfg();
            let ta = readings_to_twist(&ReadingSet(m1), &config);
            let tb = readings_to_twist(&ReadingSet(m2), &config);
            let mut combo = [0.0; 6];
            for k in 0..6 {
                combo[k] = alpha * m1[k] + beta * m2[k];
            }
            let tc = readings_to_twist(&ReadingSet(combo), &config);
            let expect_t = ta.translation * alpha + tb.translation * beta;
            let expect_r = ta.rotation * alpha + tb.rotation * beta;
            prop_assert!((tc.translation - expect_t).norm() <= 1e-15 + 1e-10 * expect_t.norm());
            prop_assert!((tc.rotation - expect_r).norm() <= 1e-15 + 1e-10 * expect_r.norm());
        }
    }
}
