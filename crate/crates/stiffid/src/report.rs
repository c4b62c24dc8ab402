//! Report emission: JSON documents with provenance metadata, plus CSV
//! matrix export for spreadsheets.
//!
//! Reports carry no timestamps; re-running a command on the same inputs
//! produces byte-identical output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::center::CenterSolution;
use crate::ingest::BlockId;
use crate::sizing::{Deflection, SweepRow};
use crate::solver::{
    CaseFits, Compliance6, Identification, IdentificationKf, PrincipalDecomposition, Stiffness6,
};
use crate::torsor::{Mat3, Mat6, Point3};

/// Provenance block embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the raw input file(s), in argument order.
    pub input_sha256: Vec<String>,
}

impl Meta {
    pub fn new(inputs: &[&[u8]]) -> Meta {
        Meta {
            tool: "stiffid".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_sha256: inputs.iter().map(|bytes| sha256_hex(bytes)).collect(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Full stiffness identification report (BT or 6-case BW campaigns).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StiffnessReport {
    pub meta: Meta,
    pub block_id: String,
    pub warnings: Vec<String>,
    pub load_condition: f64,
    pub compliance: Mat6,
    pub compliance_condition: f64,
    pub stiffness: Mat6,
    pub blocks: BlocksReport,
    pub error_percent: Mat6,
    pub symmetry_deviation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<PrincipalDecomposition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub principal_angles: Vec<PlaneAngle>,
    pub fits: Vec<CaseFits>,
}

/// Displacement-only identification report (3-case BW campaigns).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KfReport {
    pub meta: Meta,
    pub block_id: String,
    pub warnings: Vec<String>,
    pub kf: Mat3,
    pub error_percent: Mat3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<PrincipalDecomposition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub principal_angles: Vec<PlaneAngle>,
    pub fits: Vec<CaseFits>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlocksReport {
    pub kf: Mat3,
    pub kc: Mat3,
    pub kfc: Mat3,
    pub kcf: Mat3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneAngle {
    /// "xy", "yz" or "xz".
    pub plane: String,
    pub angle_deg: f64,
}

/// Parallel assembly report: the two displacement blocks, their sum and
/// its principal directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssemblyReport {
    pub meta: Meta,
    pub warnings: Vec<String>,
    pub kf_bt: Mat3,
    pub kf_bw: Mat3,
    pub kf_assembled: Mat3,
    /// Absent (with a warning) when the assembled block has a complex
    /// spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<PrincipalDecomposition>,
    /// Principal angle of the assembled block per requested plane.
    pub alpha_k: Vec<PlaneAngle>,
    /// Per-block principal angles in the same planes, for reference.
    pub angles_bt: Vec<PlaneAngle>,
    pub angles_bw: Vec<PlaneAngle>,
}

/// Stiffness-center report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterReport {
    pub meta: Meta,
    /// "fitted" when the mean-plane normals came from the measured line
    /// directions, "supplied" when the input file provided them.
    pub normals_source: String,
    pub solution: CenterSolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_v3_deg: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizingReport {
    pub meta: Meta,
    pub force_n: f64,
    pub young_n_mm2: f64,
    pub diameter_mm: f64,
    pub length_mm: f64,
    pub result: Deflection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
}

impl StiffnessReport {
    pub fn from_identification(id: &Identification, meta: Meta) -> StiffnessReport {
        StiffnessReport {
            meta,
            block_id: block_str(id.block),
            warnings: id.warnings.clone(),
            load_condition: id.compliance.load_condition,
            compliance: id.compliance.matrix,
            compliance_condition: id.compliance.condition,
            stiffness: id.stiffness.matrix,
            blocks: BlocksReport {
                kf: id.stiffness.kf(),
                kc: id.stiffness.kc(),
                kfc: id.stiffness.kfc(),
                kcf: id.stiffness.kcf(),
            },
            error_percent: id.error_percent,
            symmetry_deviation: id.symmetry_deviation,
            principal: id.principal.clone(),
            principal_angles: Vec::new(),
            fits: id.fits.clone(),
        }
    }
}

impl KfReport {
    pub fn from_identification(id: &IdentificationKf, meta: Meta) -> KfReport {
        KfReport {
            meta,
            block_id: block_str(id.block),
            warnings: id.warnings.clone(),
            kf: id.kf,
            error_percent: id.error_percent,
            principal: id.principal.clone(),
            principal_angles: Vec::new(),
            fits: id.fits.clone(),
        }
    }
}

fn block_str(b: BlockId) -> String {
    match b {
        BlockId::Bt => "BT".into(),
        BlockId::Bw => "BW".into(),
    }
}

pub fn to_json(report: &impl Serialize) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

/// CSV rendering of a 6x6 matrix (one row per line, full precision).
pub fn mat6_csv(m: &Mat6) -> String {
    let mut out = String::new();
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn mat3_csv(m: &Mat3) -> String {
    let mut out = String::new();
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// CSV rendering of a length sweep (the deflection/stiffness trade-off).
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("length_mm,deflection_mm,stiffness_n_per_m\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{:e}\n",
            r.length_mm, r.deflection_mm, r.stiffness_n_per_m
        ));
    }
    out
}

/// Human-oriented one-page summary of an identification.
pub fn summarize_stiffness(report: &StiffnessReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("block: {}\n", report.block_id));
    s.push_str(&format!(
        "load condition: {:.3e}   compliance condition: {:.3e}\n",
        report.load_condition, report.compliance_condition
    ));
    s.push_str(&format!(
        "symmetry deviation ‖K−Kᵀ‖/‖K‖: {:.3}\n",
        report.symmetry_deviation
    ));
    match &report.principal {
        Some(pd) => {
            s.push_str("principal stiffnesses (N/m): ");
            let evs: Vec<String> =
                pd.eigenvalues.iter().map(|v| format!("{v:.3e}")).collect();
            s.push_str(&evs.join(", "));
            s.push('\n');
        }
        None => s.push_str("principal stiffnesses: unavailable (see warnings)\n"),
    }
    let max_err = report
        .error_percent
        .0
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, &b| a.max(b));
    s.push_str(&format!("max fit error: {max_err:.2} %\n"));
    for w in &report.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

/// Used by `Compliance6`/`Stiffness6` consumers that only need the
/// reference point for display.
pub fn format_point(p: Point3) -> String {
    format!("({:.4}, {:.4}, {:.4}) m", p.x, p.y, p.z)
}

#[allow(dead_code)]
fn _assert_reportable(c: &Compliance6, k: &Stiffness6) -> (String, String) {
    (to_json(c), to_json(k))
}
