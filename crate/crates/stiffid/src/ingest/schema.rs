//! On-disk campaign format.
//!
//! Units are carried by the field names (`_mm`, `_daN`, `_um`) and
//! converted to SI exactly once, here. Unknown fields are rejected so a
//! file written against a different convention fails loudly instead of
//! being misread.

use serde::{Deserialize, Serialize};

use super::{
    BlockId, Campaign, IngestError, LoadCase, LoadStep, ReadingSet, SensorConfig, SensorPair,
};
use crate::fitting::Phase;
use crate::torsor::{Point3, Vec3};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub schema_version: u32,
    /// "BT" (block tool) or "BW" (block workpiece).
    pub block_id: String,
    pub sensor_config: SensorConfigFile,
    pub cases: Vec<CaseFile>,
    pub repetitions: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfigFile {
    pub pairs: Vec<PairFile>,
    pub expressed_at_mm: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub measure_axis: [f64; 3],
    pub separation_axis: [f64; 3],
    pub spacing_mm: f64,
    /// One-based reading slots of the pair's two sensors.
    pub sensors: [u8; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub label: String,
    /// Case-level load geometry; steps may override it individually.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applied_at_mm: Option<[f64; 3]>,
    #[serde(default)]
    pub steps: Vec<StepFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    #[serde(rename = "force_daN")]
    pub force_dan: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applied_at_mm: Option<[f64; 3]>,
    pub phase: Phase,
    /// Either one series of six readings or one series per repetition,
    /// averaged at parse time.
    pub readings_um: ReadingsUm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReadingsUm {
    Single([f64; 6]),
    Repeated(Vec<[f64; 6]>),
}

fn mm_to_m(v: [f64; 3]) -> Point3 {
    Point3::new(v[0] * 1e-3, v[1] * 1e-3, v[2] * 1e-3)
}

/// File value whose parse conversion reproduces `value` exactly, when
/// one exists within a few ulp of the direct conversion (it always does
/// for values that came through the parser once). Keeps write → parse
/// bit-exact despite the inexact decimal unit factors.
fn encode_exact(value: f64, to_file: impl Fn(f64) -> f64, from_file: impl Fn(f64) -> f64) -> f64 {
    let direct = to_file(value);
    if from_file(direct) == value || direct == 0.0 || !direct.is_finite() {
        return direct;
    }
    let bits = direct.to_bits();
    for k in 1..=4u64 {
        for candidate in [
            f64::from_bits(bits.wrapping_add(k)),
            f64::from_bits(bits.wrapping_sub(k)),
        ] {
            if from_file(candidate) == value {
                return candidate;
            }
        }
    }
    direct
}

fn m_to_um(m: f64) -> f64 {
    encode_exact(m, |v| v * 1e6, |v| v * 1e-6)
}

fn n_to_dan(n: f64) -> f64 {
    encode_exact(n, |v| v / 10.0, |v| v * 10.0)
}

fn m_to_mm_exact(m: f64) -> f64 {
    encode_exact(m, |v| v * 1e3, |v| v * 1e-3)
}

impl CampaignFile {
    pub fn into_campaign(self) -> Result<Campaign, IngestError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IngestError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let block = match self.block_id.as_str() {
            "BT" => BlockId::Bt,
            "BW" => BlockId::Bw,
            other => {
                return Err(IngestError::Schema(format!(
                    "block_id must be \"BT\" or \"BW\", got {other:?}"
                )))
            }
        };
        if self.sensor_config.pairs.len() != 3 {
            return Err(IngestError::Schema(format!(
                "sensor_config.pairs must have exactly 3 entries, got {}",
                self.sensor_config.pairs.len()
            )));
        }
        let mut pairs = [SensorPair {
            measure_axis: Vec3::X,
            separation_axis: Vec3::Y,
            spacing: 1.0,
            sensors: (0, 1),
        }; 3];
        for (k, p) in self.sensor_config.pairs.iter().enumerate() {
            let unit = |v: [f64; 3], what: &str| -> Result<Vec3, IngestError> {
                Vec3::from_array(v).normalized().ok_or_else(|| {
                    IngestError::Geometry(format!("pair {k}: {what} has zero length"))
                })
            };
            if p.sensors.iter().any(|&s| !(1..=6).contains(&s)) {
                return Err(IngestError::Schema(format!(
                    "pair {k}: sensor indices must be in 1..=6, got {:?}",
                    p.sensors
                )));
            }
            pairs[k] = SensorPair {
                measure_axis: unit(p.measure_axis, "measure_axis")?,
                separation_axis: unit(p.separation_axis, "separation_axis")?,
                spacing: p.spacing_mm * 1e-3,
                sensors: (p.sensors[0] as usize - 1, p.sensors[1] as usize - 1),
            };
        }
        let sensor_config = SensorConfig {
            pairs,
            expressed_at: mm_to_m(self.sensor_config.expressed_at_mm),
        };

        let repetitions = self.repetitions;
        let mut cases = Vec::with_capacity(self.cases.len());
        for case in self.cases {
            let mut steps = Vec::with_capacity(case.steps.len());
            for (i, step) in case.steps.iter().enumerate() {
                let dir_raw = step.direction.or(case.direction).ok_or_else(|| {
                    IngestError::Schema(format!(
                        "case {:?} step {i}: no direction given at step or case level",
                        case.label
                    ))
                })?;
                let direction = Vec3::from_array(dir_raw).normalized().ok_or_else(|| {
                    IngestError::Geometry(format!(
                        "case {:?} step {i}: zero-length direction",
                        case.label
                    ))
                })?;
                let applied = step.applied_at_mm.or(case.applied_at_mm).ok_or_else(|| {
                    IngestError::Schema(format!(
                        "case {:?} step {i}: no applied_at_mm at step or case level",
                        case.label
                    ))
                })?;
                let (readings, readings_std) =
                    average_readings(&step.readings_um, repetitions, &case.label, i)?;
                steps.push(LoadStep {
                    force: step.force_dan * 10.0,
                    direction,
                    applied_at: mm_to_m(applied),
                    phase: step.phase,
                    readings,
                    readings_std,
                });
            }
            cases.push(LoadCase { label: case.label, steps });
        }

        Ok(Campaign { block, sensor_config, cases, repetitions })
    }

    /// File representation of an in-memory campaign (used by the
    /// synthetic generator; inverse of `into_campaign` up to step-level
    /// vs case-level geometry placement).
    pub fn from_campaign(c: &Campaign) -> CampaignFile {
        let m_to_mm = |p: Point3| [m_to_mm_exact(p.x), m_to_mm_exact(p.y), m_to_mm_exact(p.z)];
        CampaignFile {
            schema_version: SCHEMA_VERSION,
            block_id: match c.block {
                BlockId::Bt => "BT".into(),
                BlockId::Bw => "BW".into(),
            },
            sensor_config: SensorConfigFile {
                pairs: c
                    .sensor_config
                    .pairs
                    .iter()
                    .map(|p| PairFile {
                        measure_axis: p.measure_axis.to_array(),
                        separation_axis: p.separation_axis.to_array(),
                        spacing_mm: m_to_mm_exact(p.spacing),
                        sensors: [p.sensors.0 as u8 + 1, p.sensors.1 as u8 + 1],
                    })
                    .collect(),
                expressed_at_mm: m_to_mm(c.sensor_config.expressed_at),
            },
            cases: c
                .cases
                .iter()
                .map(|case| {
                    let (dir, at) = case.geometry();
                    CaseFile {
                        label: case.label.clone(),
                        direction: Some(dir.to_array()),
                        applied_at_mm: Some(m_to_mm(at)),
                        steps: case
                            .steps
                            .iter()
                            .map(|s| StepFile {
                                force_dan: n_to_dan(s.force),
                                direction: None,
                                applied_at_mm: None,
                                phase: s.phase,
                                readings_um: ReadingsUm::Single({
                                    let mut um = [0.0; 6];
                                    for k in 0..6 {
                                        um[k] = m_to_um(s.readings.0[k]);
                                    }
                                    um
                                }),
                            })
                            .collect(),
                    }
                })
                .collect(),
            repetitions: 1,
        }
    }
}

fn average_readings(
    readings: &ReadingsUm,
    repetitions: u32,
    label: &str,
    step: usize,
) -> Result<(ReadingSet, [f64; 6]), IngestError> {
    match readings {
        ReadingsUm::Single(um) => {
            let mut m = [0.0; 6];
            for k in 0..6 {
                m[k] = um[k] * 1e-6;
            }
            Ok((ReadingSet(m), [0.0; 6]))
        }
        ReadingsUm::Repeated(series) => {
            if series.len() != repetitions as usize {
                return Err(IngestError::Schema(format!(
                    "case {label:?} step {step}: {} reading series but repetitions = {repetitions}",
                    series.len()
                )));
            }
            let n = series.len() as f64;
            let mut mean = [0.0; 6];
            for s in series {
                for k in 0..6 {
                    mean[k] += s[k] * 1e-6;
                }
            }
            for v in mean.iter_mut() {
                *v /= n;
            }
            let mut std = [0.0; 6];
            for s in series {
                for k in 0..6 {
                    let d = s[k] * 1e-6 - mean[k];
                    std[k] += d * d;
                }
            }
            for v in std.iter_mut() {
                *v = (*v / n).sqrt();
            }
            Ok((ReadingSet(mean), std))
        }
    }
}

/// Appends steps from a raw logger CSV (`case,phase,force_daN,m1..m6`,
/// readings in µm) to the matching cases of a campaign skeleton.
pub fn merge_csv_steps(
    file: &mut CampaignFile,
    csv_path: &std::path::Path,
) -> Result<(), IngestError> {
    let display = csv_path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(csv_path)
        .map_err(|e| IngestError::Csv { path: display.clone(), message: e.to_string() })?;

    let expected = ["case", "phase", "force_daN", "m1", "m2", "m3", "m4", "m5", "m6"];
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv { path: display.clone(), message: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(IngestError::Csv {
            path: display,
            message: format!("header must be {expected:?}, got {headers:?}"),
        });
    }

    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::Csv {
            path: display.clone(),
            message: e.to_string(),
        })?;
        let bad = |message: String| IngestError::Csv { path: display.clone(), message };
        if record.len() != 9 {
            return Err(bad(format!("row {line}: expected 9 fields, got {}", record.len())));
        }
        let label = record[0].to_string();
        let phase = match &record[1] {
            "charge" => Phase::Charge,
            "discharge" => Phase::Discharge,
            other => return Err(bad(format!("row {line}: unknown phase {other:?}"))),
        };
        let parse = |s: &str, what: &str| -> Result<f64, IngestError> {
            s.parse::<f64>()
                .map_err(|_| bad(format!("row {line}: bad {what} value {s:?}")))
        };
        let force = parse(&record[2], "force_daN")?;
        let mut um = [0.0; 6];
        for k in 0..6 {
            um[k] = parse(&record[3 + k], "reading")?;
        }
        let case = file
            .cases
            .iter_mut()
            .find(|c| c.label == label)
            .ok_or_else(|| IngestError::Csv {
                path: display.clone(),
                message: format!("row {line}: case {label:?} not declared in the campaign file"),
            })?;
        case.steps.push(StepFile {
            force_dan: force,
            direction: None,
            applied_at_mm: None,
            phase,
            readings_um: ReadingsUm::Single(um),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn minimal_json() -> String {
        r#"{
          "schema_version": 1,
          "block_id": "BW",
          "sensor_config": {
            "pairs": [
              {"measure_axis": [1,0,0], "separation_axis": [0,1,0], "spacing_mm": 100, "sensors": [1,2]},
              {"measure_axis": [0,1,0], "separation_axis": [0,0,1], "spacing_mm": 100, "sensors": [3,4]},
              {"measure_axis": [0,0,1], "separation_axis": [1,0,0], "spacing_mm": 100, "sensors": [5,6]}
            ],
            "expressed_at_mm": [0,0,0]
          },
          "cases": [
            {"label": "x", "direction": [1,0,0], "applied_at_mm": [0,0,50], "steps": [
              {"force_daN": 30, "phase": "charge", "readings_um": [1,1,0,0,0,0]},
              {"force_daN": 60, "phase": "charge", "readings_um": [2,2,0,0,0,0]}
            ]},
            {"label": "y", "direction": [0,1,0], "applied_at_mm": [50,0,0], "steps": [
              {"force_daN": 30, "phase": "charge", "readings_um": [0,0,1,1,0,0]},
              {"force_daN": 60, "phase": "charge", "readings_um": [0,0,2,2,0,0]}
            ]},
            {"label": "z", "direction": [0,0,1], "applied_at_mm": [0,50,0], "steps": [
              {"force_daN": 30, "phase": "charge", "readings_um": [0,0,0,0,1,1]},
              {"force_daN": 60, "phase": "charge", "readings_um": [0,0,0,0,2,2]}
            ]}
          ],
          "repetitions": 1
        }"#
        .to_string()
    }

    #[test]
    fn minimal_file_parses() {
        let campaign = crate::ingest::parse_campaign_str(&minimal_json()).unwrap();
        assert_eq!(campaign.block, BlockId::Bw);
        assert_eq!(campaign.cases.len(), 3);
        // 30 daN = 300 N, 1 µm = 1e-6 m
        assert_relative_eq!(campaign.cases[0].steps[0].force, 300.0);
        assert_relative_eq!(campaign.cases[0].steps[0].readings.0[0], 1e-6);
        assert_relative_eq!(campaign.cases[0].steps[0].applied_at.z, 0.05);
    }

    #[test]
    fn single_case_file_parses_but_does_not_identify() {
        // schema identity: one case is a valid file; identification
        // rejects the shape later
        let full: CampaignFile = serde_json::from_str(&minimal_json()).unwrap();
        let mut one = full.clone();
        one.cases.truncate(1);
        let text = serde_json::to_string(&one).unwrap();
        let campaign = crate::ingest::parse_campaign_str(&text).unwrap();
        assert_eq!(campaign.cases.len(), 1);
        assert!(matches!(
            crate::solver::identify(&campaign),
            Err(crate::solver::SolverError::UnsupportedShape { cases: 1 })
        ));
    }

    #[test]
    fn zero_spacing_is_geometry_error() {
        let text = minimal_json().replace("\"spacing_mm\": 100, \"sensors\": [1,2]",
                                          "\"spacing_mm\": 0, \"sensors\": [1,2]");
        match crate::ingest::parse_campaign_str(&text) {
            Err(IngestError::Geometry(_)) => {}
            other => panic!("expected GeometryError, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_schema_error() {
        let text = minimal_json().replace("\"repetitions\": 1", "\"repetitions\": 1, \"extra\": 2");
        assert!(matches!(
            crate::ingest::parse_campaign_str(&text),
            Err(IngestError::Schema(_))
        ));
    }

    #[test]
    fn missing_unit_tagged_field_is_schema_error() {
        let text = minimal_json().replace("force_daN", "force");
        assert!(matches!(
            crate::ingest::parse_campaign_str(&text),
            Err(IngestError::Schema(_))
        ));
    }

    #[test]
    fn repetition_averaging_and_std() {
        // a repeated series must match the declared repetition count
        let text = minimal_json().replace(
            "\"readings_um\": [1,1,0,0,0,0]",
            "\"readings_um\": [[0,1,0,0,0,0],[2,1,0,0,0,0],[1,1,0,0,0,0]]",
        ).replace("\"repetitions\": 1", "\"repetitions\": 2");
        assert!(matches!(
            crate::ingest::parse_campaign_str(&text),
            Err(IngestError::Schema(_))
        ));

        // two repetitions of the first step: mean 1 µm, σ 1 µm on m1
        let text = minimal_json()
            .replace(
                "\"readings_um\": [1,1,0,0,0,0]",
                "\"readings_um\": [[0,1,0,0,0,0],[2,1,0,0,0,0]]",
            )
            .replace("\"repetitions\": 1", "\"repetitions\": 2");
        let campaign = crate::ingest::parse_campaign_str(&text).unwrap();
        let step = &campaign.cases[0].steps[0];
        assert_relative_eq!(step.readings.0[0], 1e-6, max_relative = 1e-12);
        assert_relative_eq!(step.readings_std[0], 1e-6, max_relative = 1e-12);
        assert_relative_eq!(step.readings_std[1], 0.0);
        // single series are accepted as pre-averaged data
        assert_eq!(campaign.cases[1].steps[0].readings_std, [0.0; 6]);
    }

    #[test]
    fn csv_steps_merge() {
        use std::io::Write;
        let dir = std::env::temp_dir().join("stiffid_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let json_path = dir.join("skeleton.json");
        let csv_path = dir.join("readings.csv");

        let mut skeleton: CampaignFile =
            serde_json::from_str(&minimal_json()).unwrap();
        for case in skeleton.cases.iter_mut() {
            case.steps.clear();
        }
        std::fs::write(&json_path, serde_json::to_string(&skeleton).unwrap()).unwrap();

        let mut f = std::fs::File::create(&csv_path).unwrap();
        writeln!(f, "case,phase,force_daN,m1,m2,m3,m4,m5,m6").unwrap();
        for case in ["x", "y", "z"] {
            for (force, val) in [(30.0, 1.0), (60.0, 2.0)] {
                writeln!(f, "{case},charge,{force},{val},{val},{val},{val},{val},{val}").unwrap();
            }
        }
        drop(f);

        let campaign = crate::ingest::parse_campaign_with_csv(&json_path, &csv_path).unwrap();
        assert_eq!(campaign.cases[0].steps.len(), 2);
        assert_relative_eq!(campaign.cases[2].steps[1].force, 600.0);
        assert_relative_eq!(campaign.cases[2].steps[1].readings.0[5], 2e-6);
    }
}
