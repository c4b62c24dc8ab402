//! Compliance/stiffness identification from fitted load cases.
//!
//! Six (wrench, twist) pairs stacked as columns give `D = C₀ · T`; the
//! compliance follows from a column-wise linear solve and the global
//! stiffness matrix is its inverse. The 3x3 quadrants of the stiffness
//! matrix separate displacement, rotation and the two coupling
//! stiffnesses; block tool and block workpiece displacement blocks add
//! like parallel springs, and the eigenvectors of the assembled block
//! carry the principal deformation directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitting::{self, midline, ChargePath, MidlineFit, Phase};
use crate::ingest::{readings_to_twist, BlockId, Campaign, LoadCase};
use crate::torsor::{eig3_real, EigError, Frame, Mat3, Mat6, Point3, Twist, Vec3, Wrench};

/// Load sets with a worse condition number than this cannot be inverted
/// meaningfully.
pub const SINGULAR_COND_LIMIT: f64 = 1e8;
/// Above this condition number the identification is flagged as
/// ill-conditioned (but still carried out).
pub const ILL_COND_LIMIT: f64 = 1e6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("singular load set: the six wrenches do not span 6D (condition {condition:.3e})")]
    SingularLoadSet { condition: f64 },
    #[error("matrix is singular and cannot be inverted")]
    Singular,
    #[error("torsor {index} is expressed at a different point than the first one")]
    MixedReferencePoints { index: usize },
    #[error("projected eigenvector norm {norm:.3e} below 1e-6: direction is perpendicular to the plane")]
    DegenerateProjection { norm: f64 },
    #[error("plane axes are not orthonormal")]
    InvalidPlane,
    #[error("campaign shape unsupported: identification needs 6 load cases (or 3 translation-only BW cases), got {cases}")]
    UnsupportedShape { cases: usize },
    #[error(transparent)]
    ComplexSpectrum(#[from] EigError),
    #[error(transparent)]
    Fit(#[from] fitting::FitError),
}

/// 6x6 flexibility matrix mapping wrenches to twists (mixed units:
/// rad/N, m/N, rad/(N·m), m/(N·m)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compliance6 {
    pub matrix: Mat6,
    pub at: Point3,
    pub axes: Frame,
    /// 1-norm condition estimate of the compliance itself.
    pub condition: f64,
    /// 1-norm condition estimate of the wrench column matrix it was
    /// identified from.
    pub load_condition: f64,
}

impl Compliance6 {
    pub fn is_ill_conditioned(&self) -> bool {
        self.load_condition > ILL_COND_LIMIT
    }
}

/// 6x6 stiffness matrix with the fixed quadrant layout:
/// upper-right = displacement block K_F (N/m), lower-left = rotation
/// block K_C (N·m/rad), upper-left = K_FC (N/rad), lower-right = K_CF
/// (N·m/m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stiffness6 {
    pub matrix: Mat6,
    pub at: Point3,
    pub axes: Frame,
}

/// Which 3x3 quadrant of a stiffness matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    /// Displacement stiffness (N/m), upper-right.
    F,
    /// Rotation stiffness (N·m/rad), lower-left.
    C,
    /// Displacement/rotation coupling (N/rad), upper-left.
    FC,
    /// Rotation/displacement coupling (N·m/m), lower-right.
    CF,
}

impl Stiffness6 {
    pub fn kf(&self) -> Mat3 {
        extract_block(self, Block::F)
    }

    pub fn kc(&self) -> Mat3 {
        extract_block(self, Block::C)
    }

    pub fn kfc(&self) -> Mat3 {
        extract_block(self, Block::FC)
    }

    pub fn kcf(&self) -> Mat3 {
        extract_block(self, Block::CF)
    }

    /// ‖K − Kᵀ‖/‖K‖. Identified matrices are not symmetrized; this
    /// reports how far the measurement drifted from reciprocity.
    pub fn symmetry_deviation(&self) -> f64 {
        let n = self.matrix.frobenius_norm();
        if n == 0.0 {
            return 0.0;
        }
        (self.matrix - self.matrix.transpose()).frobenius_norm() / n
    }
}

/// Stacks six (wrench, twist) pairs and solves `D = C₀ · T` column-wise.
///
/// All torsors must be expressed at the same point; the wrench columns
/// must span 6D (condition below `SINGULAR_COND_LIMIT`).
pub fn assemble_compliance(cases: &[(Wrench, Twist); 6]) -> Result<Compliance6, SolverError> {
    let at = cases[0].0.at;
    let axes = cases[0].0.axes;
    for (i, (w, t)) in cases.iter().enumerate() {
        if (w.at - at).norm() > 1e-12 || (t.at - at).norm() > 1e-12 {
            return Err(SolverError::MixedReferencePoints { index: i });
        }
    }

    let mut t_cols = [[0.0; 6]; 6];
    let mut d_cols = [[0.0; 6]; 6];
    for (j, (w, t)) in cases.iter().enumerate() {
        t_cols[j] = w.as_vector();
        d_cols[j] = t.as_vector();
    }
    let t_mat = Mat6::from_columns(&t_cols);
    let d_mat = Mat6::from_columns(&d_cols);

    let load_condition = t_mat.condition_1norm();
    if !load_condition.is_finite() || load_condition > SINGULAR_COND_LIMIT {
        return Err(SolverError::SingularLoadSet { condition: load_condition });
    }

    // C₀ T = D  ⇔  Tᵀ C₀ᵀ = Dᵀ: solve for C₀ᵀ row by row of D
    let t_t = t_mat.transpose();
    let mut c0 = Mat6::ZERO;
    for i in 0..6 {
        let rhs = d_mat.0[i];
        let sol = t_t.solve(&rhs).ok_or(SolverError::SingularLoadSet {
            condition: load_condition,
        })?;
        c0.0[i] = sol;
    }

    Ok(Compliance6 {
        matrix: c0,
        at,
        axes,
        condition: c0.condition_1norm(),
        load_condition,
    })
}

/// `[K] = [C₀]⁻¹`.
pub fn invert_to_stiffness(c0: &Compliance6) -> Result<Stiffness6, SolverError> {
    let matrix = c0.matrix.inverse().ok_or(SolverError::Singular)?;
    Ok(Stiffness6 { matrix, at: c0.at, axes: c0.axes })
}

/// Designated 3x3 quadrant per the fixed layout.
pub fn extract_block(k: &Stiffness6, which: Block) -> Mat3 {
    match which {
        Block::FC => k.matrix.block(0, 0),
        Block::F => k.matrix.block(0, 3),
        Block::C => k.matrix.block(3, 0),
        Block::CF => k.matrix.block(3, 3),
    }
}

/// Parallel spring assembly: stiffnesses sharing the deflection point add.
pub fn assemble_parallel(kf_a: &Mat3, kf_b: &Mat3) -> Mat3 {
    *kf_a + *kf_b
}

/// Principal stiffnesses and deformation directions of a displacement
/// block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalDecomposition {
    /// Ascending by magnitude (N/m).
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors as matrix columns, in eigenvalue order.
    pub eigenvectors: Mat3,
    /// Which displacement block was decomposed.
    pub source: String,
}

pub fn principal_decomposition(
    kf: &Mat3,
    source: impl Into<String>,
) -> Result<PrincipalDecomposition, SolverError> {
    let eig = eig3_real(kf)?;
    Ok(PrincipalDecomposition {
        eigenvalues: eig.values,
        eigenvectors: eig.vector_matrix(),
        source: source.into(),
    })
}

impl PrincipalDecomposition {
    /// Eigenvector of the smallest-magnitude stiffness: the direction of
    /// maximum deformation.
    pub fn max_deformation_direction(&self) -> Vec3 {
        self.eigenvectors.column(0)
    }
}

/// Plane spanned by two orthonormal axes, used to report in-plane
/// principal angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub axis1: Vec3,
    pub axis2: Vec3,
}

impl Plane {
    pub const XY: Plane = Plane { axis1: Vec3::X, axis2: Vec3::Y };
    pub const YZ: Plane = Plane { axis1: Vec3::Y, axis2: Vec3::Z };
    pub const XZ: Plane = Plane { axis1: Vec3::X, axis2: Vec3::Z };

    fn is_orthonormal(&self) -> bool {
        (self.axis1.norm() - 1.0).abs() < 1e-9
            && (self.axis2.norm() - 1.0).abs() < 1e-9
            && self.axis1.dot(self.axis2).abs() < 1e-9
    }
}

/// Angle (degrees, in [0°, 180°)) of the maximum-deformation direction
/// projected into `plane`, measured from `axis1` towards `axis2`.
pub fn principal_angle_in_plane(
    pd: &PrincipalDecomposition,
    plane: &Plane,
) -> Result<f64, SolverError> {
    if !plane.is_orthonormal() {
        return Err(SolverError::InvalidPlane);
    }
    let v = pd.max_deformation_direction();
    let c1 = v.dot(plane.axis1);
    let c2 = v.dot(plane.axis2);
    let norm = (c1 * c1 + c2 * c2).sqrt();
    if norm < 1e-6 {
        return Err(SolverError::DegenerateProjection { norm });
    }
    let mut angle = c2.atan2(c1).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if angle >= 180.0 {
        angle -= 180.0;
    }
    Ok(angle)
}

/// Everything identified from one campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Identification {
    pub block: BlockId,
    /// Midline fit for every (twist component, load case) pair.
    pub fits: Vec<CaseFits>,
    pub compliance: Compliance6,
    pub stiffness: Stiffness6,
    /// Per-entry fit error (%), same layout as the stiffness matrix
    /// columns: row = twist component, column = load case.
    pub error_percent: Mat6,
    pub symmetry_deviation: f64,
    /// Absent (with a warning) when the identified displacement block
    /// has a complex spectrum.
    pub principal: Option<PrincipalDecomposition>,
    pub warnings: Vec<String>,
}

/// Translation-only identification (3 load cases, displacement block
/// only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentificationKf {
    pub block: BlockId,
    pub fits: Vec<CaseFits>,
    pub kf: Mat3,
    /// Row = translation component, column = load case.
    pub error_percent: Mat3,
    pub principal: Option<PrincipalDecomposition>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseFits {
    pub label: String,
    /// One midline fit per twist component, `[ρx, ρy, ρz, εx, εy, εz]`
    /// (or `[εx, εy, εz]` for translation-only campaigns).
    pub components: Vec<MidlineFit>,
}

/// Outcome of identifying a campaign: full 6x6 or displacement-only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum IdentifyOutput {
    Full(Box<Identification>),
    TranslationOnly(Box<IdentificationKf>),
}

/// Runs the whole identification chain on a validated campaign:
/// readings → twists → per-level midline fits → compliance → stiffness.
pub fn identify(campaign: &Campaign) -> Result<IdentifyOutput, SolverError> {
    match (campaign.block, campaign.cases.len()) {
        (BlockId::Bw, 3) => identify_translation_only(campaign)
            .map(|id| IdentifyOutput::TranslationOnly(Box::new(id))),
        (_, 6) => identify_full(campaign).map(|id| IdentifyOutput::Full(Box::new(id))),
        (_, cases) => Err(SolverError::UnsupportedShape { cases }),
    }
}

fn case_twists(campaign: &Campaign, case: &LoadCase, phase: Phase) -> Vec<(f64, Twist)> {
    case.steps_in_phase(phase)
        .map(|s| (s.force, readings_to_twist(&s.readings, &campaign.sensor_config)))
        .collect()
}

/// Midline fit of each twist component of one case against force.
fn fit_case(
    campaign: &Campaign,
    case: &LoadCase,
    warnings: &mut Vec<String>,
) -> Result<Vec<MidlineFit>, SolverError> {
    let charge = case_twists(campaign, case, Phase::Charge);
    let discharge = case_twists(campaign, case, Phase::Discharge);
    for (_, t) in charge.iter().chain(&discharge) {
        if t.exceeds_small_rotation() {
            warnings.push(format!(
                "case {:?}: rotation exceeds the small-displacement limit",
                case.label
            ));
            break;
        }
    }

    let mut fits = Vec::with_capacity(6);
    for comp in 0..6 {
        let series = |steps: &[(f64, Twist)]| -> Vec<(f64, f64)> {
            steps.iter().map(|(f, t)| (*f, t.as_vector()[comp])).collect()
        };
        let charge_path = ChargePath::new(series(&charge), Phase::Charge)?;
        let fit = if discharge.is_empty() {
            // no unloading branch: plain least squares on the charge path
            let pts = series(&charge);
            let (slope, intercept, rms) = fitting::fit_line(&pts)?;
            MidlineFit {
                slope,
                intercept,
                residuals: pts.iter().map(|&(x, y)| y - (slope * x + intercept)).collect(),
                rms_residual: rms,
                half_widths: vec![0.0; pts.len()],
                levels: pts.iter().map(|p| p.0).collect(),
                midpoints: pts.iter().map(|p| p.1).collect(),
            }
        } else {
            let discharge_path = ChargePath::new(series(&discharge), Phase::Discharge)?;
            midline(&charge_path, &discharge_path)?
        };
        fits.push(fit);
    }
    Ok(fits)
}

fn error_entry(fit: &MidlineFit) -> f64 {
    let scale = fitting::full_scale(fit);
    fitting::error_percent(fit, scale).unwrap_or(0.0)
}

/// Principal directions of an identified block, demoted to a warning
/// when the measured matrix turned out complex-spectrum (the rest of
/// the identification is still valid and reportable).
fn decompose_or_warn(
    kf: &Mat3,
    source: &str,
    warnings: &mut Vec<String>,
) -> Option<PrincipalDecomposition> {
    match principal_decomposition(kf, source) {
        Ok(pd) => Some(pd),
        Err(e) => {
            warnings.push(format!("principal decomposition of {source} unavailable: {e}"));
            None
        }
    }
}

fn identify_full(campaign: &Campaign) -> Result<Identification, SolverError> {
    let at = campaign.sensor_config.expressed_at;
    let mut warnings = Vec::new();
    let mut fits = Vec::with_capacity(6);
    let mut pairs: Vec<(Wrench, Twist)> = Vec::with_capacity(6);
    let mut error_percent = Mat6::ZERO;

    for (j, case) in campaign.cases.iter().enumerate() {
        let component_fits = fit_case(campaign, case, &mut warnings)?;
        let mut slope = [0.0; 6];
        for (i, fit) in component_fits.iter().enumerate() {
            slope[i] = fit.slope;
            error_percent.0[i][j] = error_entry(fit);
        }
        // per-newton twist paired with the unit wrench of the case
        pairs.push((case.unit_wrench(at), Twist::from_vector(&slope, at)));
        fits.push(CaseFits { label: case.label.clone(), components: component_fits });
    }

    let pairs: [(Wrench, Twist); 6] = pairs.try_into().expect("validated 6-case campaign");
    let compliance = assemble_compliance(&pairs)?;
    if compliance.is_ill_conditioned() {
        warnings.push(format!(
            "load set is ill-conditioned (condition {:.3e})",
            compliance.load_condition
        ));
    }
    let stiffness = invert_to_stiffness(&compliance)?;
    let principal = decompose_or_warn(&stiffness.kf(), "K_F", &mut warnings);

    Ok(Identification {
        block: campaign.block,
        fits,
        compliance,
        symmetry_deviation: stiffness.symmetry_deviation(),
        stiffness,
        error_percent,
        principal,
        warnings,
    })
}

fn identify_translation_only(campaign: &Campaign) -> Result<IdentificationKf, SolverError> {
    let mut warnings = Vec::new();
    let mut fits = Vec::with_capacity(3);
    let mut error_percent = Mat3::ZERO;
    // translation slope of each case, as columns against force direction
    let mut slope_cols = [Vec3::ZERO; 3];
    let mut dir_cols = [Vec3::ZERO; 3];

    for (j, case) in campaign.cases.iter().enumerate() {
        let component_fits = fit_case(campaign, case, &mut warnings)?;
        let translations = &component_fits[3..6];
        slope_cols[j] = Vec3::new(
            translations[0].slope,
            translations[1].slope,
            translations[2].slope,
        );
        dir_cols[j] = case.geometry().0;
        for (i, fit) in translations.iter().enumerate() {
            error_percent.0[i][j] = error_entry(fit);
        }
        fits.push(CaseFits {
            label: case.label.clone(),
            components: translations.to_vec(),
        });
    }

    // C_F · dirs = slopes, then K_F = C_F⁻¹
    let dirs = Mat3::from_columns(dir_cols[0], dir_cols[1], dir_cols[2]);
    let slopes = Mat3::from_columns(slope_cols[0], slope_cols[1], slope_cols[2]);
    let dirs_inv = dirs.inverse().ok_or(SolverError::SingularLoadSet {
        condition: dirs.condition_1norm(),
    })?;
    let c_f = slopes * dirs_inv;
    let kf = c_f.inverse().ok_or(SolverError::Singular)?;
    let principal = decompose_or_warn(&kf, "K_F", &mut warnings);

    Ok(IdentificationKf {
        block: campaign.block,
        fits,
        kf,
        error_percent,
        principal,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn canonical_cases(c0: &Mat6) -> [(Wrench, Twist); 6] {
        // six independent unit wrenches: three forces with distinct
        // lever points per axis pair
        let defs = [
            (Vec3::X, Point3::new(0.0, 0.0, 0.05)),
            (Vec3::X, Point3::new(0.0, 0.0, -0.05)),
            (Vec3::Y, Point3::new(0.05, 0.0, 0.0)),
            (Vec3::Y, Point3::new(-0.05, 0.0, 0.0)),
            (Vec3::Z, Point3::new(0.0, 0.05, 0.0)),
            (Vec3::Z, Point3::new(0.0, -0.05, 0.0)),
        ];
        defs.map(|(dir, at)| {
            let w = crate::torsor::wrench_from_point_force(dir, at, Point3::ORIGIN);
            let d = c0.mul_vec(&w.as_vector());
            (w, Twist::from_vector(&d, Point3::ORIGIN))
        })
    }

    #[test]
    fn identity_loads_give_identity_compliance() {
        let mut cases = Vec::new();
        for j in 0..6 {
            let mut t = [0.0; 6];
            t[j] = 1.0;
            let w = Wrench::new(
                Vec3::new(t[0], t[1], t[2]),
                Vec3::new(t[3], t[4], t[5]),
                Point3::ORIGIN,
            );
            let d = Twist::from_vector(&t, Point3::ORIGIN);
            cases.push((w, d));
        }
        let cases: [(Wrench, Twist); 6] = cases.try_into().unwrap();
        let c0 = assemble_compliance(&cases).unwrap();
        let err = (c0.matrix - Mat6::identity()).frobenius_norm();
        assert!(err < 1e-12);
        assert_relative_eq!(c0.load_condition, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn synth_roundtrip_recovers_k() {
        // a well-conditioned asymmetric stiffness
        let mut k = Mat6::ZERO;
        for i in 0..6 {
            k.0[i][i] = 1e6 * (i + 1) as f64;
            for j in 0..6 {
                if i != j {
                    k.0[i][j] = 1e5 * ((i * 6 + j) as f64 * 0.37).sin();
                }
            }
        }
        let c0_true = k.inverse().unwrap();
        let cases = canonical_cases(&c0_true);
        let c0 = assemble_compliance(&cases).unwrap();
        let prod = c0.matrix.mul_mat(&k);
        let err = (prod - Mat6::identity()).frobenius_norm();
        assert!(err < 1e-9, "C0·K − I = {err:.3e}");

        let krec = invert_to_stiffness(&c0).unwrap();
        let rel = (krec.matrix - k).frobenius_norm() / k.frobenius_norm();
        assert!(rel < 1e-8, "rel = {rel:.3e}");

        // {T} = [K]{D} holds for all six cases
        for (w, t) in &cases {
            let pred = krec.matrix.mul_vec(&t.as_vector());
            let actual = w.as_vector();
            for i in 0..6 {
                let scale = actual.iter().map(|v| v.abs()).fold(1e-12, f64::max);
                assert!((pred[i] - actual[i]).abs() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn coplanar_force_loads_are_singular() {
        // six pure forces through the origin with coplanar directions
        let mut cases = Vec::new();
        for j in 0..6 {
            let angle = j as f64;
            let dir = Vec3::new(angle.cos(), angle.sin(), 0.0);
            let w = Wrench::new(dir, Vec3::ZERO, Point3::ORIGIN);
            cases.push((w, Twist::from_vector(&[0.0; 6], Point3::ORIGIN)));
        }
        let cases: [(Wrench, Twist); 6] = cases.try_into().unwrap();
        match assemble_compliance(&cases) {
            Err(SolverError::SingularLoadSet { .. }) => {}
            other => panic!("expected SingularLoadSet, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_compliance_inverts_to_reciprocal() {
        let mut c = Mat6::ZERO;
        for i in 0..6 {
            c.0[i][i] = (i + 1) as f64 * 1e-7;
        }
        let c0 = Compliance6 {
            matrix: c,
            at: Point3::ORIGIN,
            axes: Frame::Machine,
            condition: c.condition_1norm(),
            load_condition: 1.0,
        };
        let k = invert_to_stiffness(&c0).unwrap();
        for i in 0..6 {
            assert_relative_eq!(k.matrix.0[i][i], 1.0 / c.0[i][i], max_relative = 1e-12);
        }
    }

    #[test]
    fn block_layout_of_identity() {
        let k = Stiffness6 {
            matrix: Mat6::identity(),
            at: Point3::ORIGIN,
            axes: Frame::Machine,
        };
        assert_eq!(extract_block(&k, Block::FC), Mat3::identity());
        assert_eq!(extract_block(&k, Block::CF), Mat3::identity());
        assert_eq!(extract_block(&k, Block::F), Mat3::ZERO);
        assert_eq!(extract_block(&k, Block::C), Mat3::ZERO);
    }

    #[test]
    fn blocks_tile_the_matrix() {
        let mut m = Mat6::ZERO;
        for i in 0..6 {
            for j in 0..6 {
                m.0[i][j] = (i * 6 + j) as f64 + 0.5;
            }
        }
        let k = Stiffness6 { matrix: m, at: Point3::ORIGIN, axes: Frame::Machine };
        let mut rebuilt = Mat6::ZERO;
        rebuilt.set_block(0, 0, &k.kfc());
        rebuilt.set_block(0, 3, &k.kf());
        rebuilt.set_block(3, 0, &k.kc());
        rebuilt.set_block(3, 3, &k.kcf());
        assert_eq!(rebuilt, m);
    }

    #[test]
    fn parallel_assembly_is_addition() {
        let a = Mat3([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        let b = Mat3([[10.0, 0.0, 0.0], [0.0, 20.0, 0.0], [0.0, 0.0, 30.0]]);
        let sum = assemble_parallel(&a, &b);
        assert_eq!(sum.0[0][0], 11.0);
        assert_eq!(sum.0[1][1], 22.0);
        assert_eq!(sum.0[2][2], 33.0);
        assert_eq!(assemble_parallel(&a, &Mat3::ZERO), a);
        // commutative and associative by construction
        assert_eq!(assemble_parallel(&a, &b), assemble_parallel(&b, &a));
    }

    #[test]
    fn principal_angles_along_axes() {
        let pd = PrincipalDecomposition {
            eigenvalues: [1.0, 2.0, 3.0],
            eigenvectors: Mat3::identity(),
            source: "test".into(),
        };
        assert_relative_eq!(principal_angle_in_plane(&pd, &Plane::XY).unwrap(), 0.0);
        let along_y = PrincipalDecomposition {
            eigenvectors: Mat3::from_columns(Vec3::Y, Vec3::X, Vec3::Z),
            ..pd.clone()
        };
        assert_relative_eq!(
            principal_angle_in_plane(&along_y, &Plane::XY).unwrap(),
            90.0
        );
        // eigenvector perpendicular to the plane
        let along_z = PrincipalDecomposition {
            eigenvectors: Mat3::from_columns(Vec3::Z, Vec3::X, Vec3::Y),
            ..pd
        };
        assert!(matches!(
            principal_angle_in_plane(&along_z, &Plane::XY),
            Err(SolverError::DegenerateProjection { .. })
        ));
    }

    #[test]
    fn scaling_leaves_angles_invariant() {
        let kf = Mat3([[4.0e6, 1.0e5, 0.0], [2.0e5, 7.0e6, 1.0e5], [0.0, 1.0e5, 9.0e6]]);
        let pd1 = principal_decomposition(&kf, "a").unwrap();
        let pd2 = principal_decomposition(&kf.scale(3.5), "b").unwrap();
        for i in 0..3 {
            assert_relative_eq!(pd2.eigenvalues[i], 3.5 * pd1.eigenvalues[i], max_relative = 1e-9);
        }
        let a1 = principal_angle_in_plane(&pd1, &Plane::XY).unwrap();
        let a2 = principal_angle_in_plane(&pd2, &Plane::XY).unwrap();
        assert_relative_eq!(a1, a2, max_relative = 1e-9);
    }
}
