//! Stiffness (rotation) center of the tool block.
//!
//! For each loading direction two measured displacement lines nearly
//! intersect; the midpoint of their common perpendicular is the
//! per-axis intersection estimate M, the perpendicular length μ the
//! line separation, and the coplanarity deviation θ the smallest tilt
//! of either line about its charge point that would make them meet.
//! A mean plane per axis (normal = least-scatter direction of the two
//! line directions) yields a normal line through M; the least-squares
//! intersection of the three normal lines is the stiffness center CR.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::torsor::{eig3_real, Mat3, Point3, Vec3};

/// Line directions whose cross product falls below this are treated as
/// parallel.
pub const PARALLEL_TOL: f64 = 1e-8;
/// Normal-equation condition ceiling for the center solve.
pub const DEGENERATE_COND_LIMIT: f64 = 1e8;

#[derive(Debug, Error)]
pub enum CenterError {
    #[error("zero displacement vector: no line direction")]
    ZeroDisplacement,
    #[error("lines are parallel (inter-line distance {distance:.3e} m); no intersection point")]
    ParallelLines { distance: f64 },
    #[error("normal directions are degenerate (condition {condition:.3e}); center is not localizable")]
    DegenerateDirections { condition: f64 },
    #[error("zero-length vector in angle computation")]
    ZeroVector,
    #[error("expected {expected} lines, got {got}")]
    WrongLineCount { expected: usize, got: usize },
    #[error("center file schema error: {0}")]
    Schema(String),
    #[error("I/O error reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CenterError {
    pub fn category(&self) -> crate::error::ErrorCategory {
        match self {
            CenterError::Schema(_) => crate::error::ErrorCategory::Validation,
            CenterError::Io { .. } => crate::error::ErrorCategory::Io,
            _ => crate::error::ErrorCategory::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// Loading axis and measurement index a line came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineLabel {
    pub axis: Axis,
    /// 1 or 2 for measured lines, 0 for derived normal lines.
    pub index: u8,
}

/// 3D line through a point along a unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line3 {
    pub point: Point3,
    pub direction: Vec3,
    pub label: LineLabel,
}

impl Line3 {
    pub fn new(point: Point3, direction: Vec3, label: LineLabel) -> Result<Self, CenterError> {
        let direction = direction.normalized().ok_or(CenterError::ZeroDisplacement)?;
        Ok(Line3 { point, direction, label })
    }

    /// Squared distance from `p` to the line, computed from the
    /// perpendicular residual vector (no cancellation for points on or
    /// near the line).
    pub fn distance_squared(&self, p: Point3) -> f64 {
        let v = p - self.point;
        let perp = v - self.direction * v.dot(self.direction);
        perp.norm_squared()
    }
}

/// Per-axis near-intersection of the two measured lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisIntersection {
    /// Midpoint of the common perpendicular segment (m).
    pub m: Point3,
    /// Minimal line-to-line distance (m).
    pub mu: f64,
    /// Coplanarity deviation (degrees, in [0°, 90°]).
    pub theta_deg: f64,
}

/// Mean plane of one loading axis: contains the intersection estimate,
/// oriented by the least-scatter normal of the two line directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPlane {
    pub point: Point3,
    pub normal: Vec3,
}

/// Least-squares intersection of the three normal lines plus the
/// per-axis evidence it was built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterSolution {
    /// Stiffness center (m).
    pub cr: Point3,
    /// RMS distance from `cr` to the normal lines (m).
    pub residual: f64,
    pub axes: Vec<AxisReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisReport {
    pub axis: Axis,
    /// Absent when the input supplied normal lines without the raw
    /// per-axis measurements.
    pub intersection: Option<AxisIntersection>,
    pub plane: MeanPlane,
}

/// Builds a displacement line from a charge point (mm) and its measured
/// displacement vector (m).
pub fn line_from_measurement(
    p_mm: Point3,
    d_m: Vec3,
    label: LineLabel,
) -> Result<Line3, CenterError> {
    let point = Point3::new(p_mm.x * 1e-3, p_mm.y * 1e-3, p_mm.z * 1e-3);
    Line3::new(point, d_m, label)
}

/// Closest points on two skew lines: M is the midpoint of the common
/// perpendicular, μ its length. The coplanarity deviation θ is the
/// smaller of the two angles by which either line, hinged at its
/// anchor point, would have to tilt to pass through the other line's
/// closest point (zero when the lines actually intersect).
pub fn closest_point_pair(l1: &Line3, l2: &Line3) -> Result<AxisIntersection, CenterError> {
    let u1 = l1.direction;
    let u2 = l2.direction;
    let cross = u1.cross(u2);
    if cross.norm() < PARALLEL_TOL {
        // distance between parallel lines
        let v = l2.point - l1.point;
        let distance = (v - u1 * v.dot(u1)).norm();
        return Err(CenterError::ParallelLines { distance });
    }

    let r = l1.point - l2.point;
    let b = u1.dot(u2);
    let c = u1.dot(r);
    let f = u2.dot(r);
    let den = 1.0 - b * b;
    let s = (b * f - c) / den;
    let t = (f - b * c) / den;
    let q1 = l1.point + u1 * s;
    let q2 = l2.point + u2 * t;
    let m = q1 + (q2 - q1) * 0.5;
    let mu = (q2 - q1).norm();

    let tilt = |anchor: Point3, toward: Point3| -> Option<f64> {
        let lever = (toward - anchor).norm();
        if lever < 1e-12 {
            None
        } else {
            Some((mu / lever).clamp(0.0, 1.0).asin())
        }
    };
    let theta = match (tilt(l1.point, q2), tilt(l2.point, q1)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    };

    Ok(AxisIntersection { m, mu, theta_deg: theta.to_degrees() })
}

/// Mean plane through `m` whose normal minimizes Σ(n·dir)² over the two
/// line directions (the smallest-eigenvalue direction of the 3x3
/// direction scatter). Sign is fixed towards positive z (then y, then x
/// for normals in the z = 0 plane).
pub fn fit_mean_plane(l1: &Line3, l2: &Line3, m: Point3) -> Result<MeanPlane, CenterError> {
    if l1.direction.cross(l2.direction).norm() < PARALLEL_TOL {
        let v = l2.point - l1.point;
        let distance = (v - l1.direction * v.dot(l1.direction)).norm();
        return Err(CenterError::ParallelLines { distance });
    }
    let scatter = Mat3::outer(l1.direction, l1.direction) + Mat3::outer(l2.direction, l2.direction);
    let eig = eig3_real(&scatter).expect("symmetric scatter has a real spectrum");
    let mut normal = eig.vectors[0];
    for &comp in &[normal.z, normal.y, normal.x] {
        if comp.abs() > 1e-12 {
            if comp < 0.0 {
                normal = -normal;
            }
            break;
        }
    }
    Ok(MeanPlane { point: m, normal })
}

/// Point minimizing the summed squared distance to the given lines via
/// the closed-form normal equations Σ(I − nnᵀ)·CR = Σ(I − nnᵀ)·M.
/// Returns the point and the RMS line distance.
pub fn solve_center(lines: &[Line3]) -> Result<(Point3, f64), CenterError> {
    if lines.len() < 2 {
        return Err(CenterError::WrongLineCount { expected: 3, got: lines.len() });
    }
    let mut a = Mat3::ZERO;
    let mut rhs = Vec3::ZERO;
    for line in lines {
        let proj = Mat3::identity() - Mat3::outer(line.direction, line.direction);
        a = a + proj;
        rhs += proj * line.point.as_vec();
    }
    let condition = a.condition_1norm();
    if !condition.is_finite() || condition > DEGENERATE_COND_LIMIT {
        return Err(CenterError::DegenerateDirections { condition });
    }
    let cr_vec = a
        .solve(rhs)
        .ok_or(CenterError::DegenerateDirections { condition })?;
    let cr = Point3::new(cr_vec.x, cr_vec.y, cr_vec.z);
    let ss: f64 = lines.iter().map(|l| l.distance_squared(cr)).sum();
    Ok((cr, (ss / lines.len() as f64).sqrt()))
}

/// Runs the full per-axis chain on three measured line pairs (in x, y,
/// z order) and intersects the resulting mean-plane normals.
pub fn full_solution(pairs: &[(Line3, Line3); 3]) -> Result<CenterSolution, CenterError> {
    let mut reports = Vec::with_capacity(3);
    let mut normals = Vec::with_capacity(3);
    for (l1, l2) in pairs {
        let intersection = closest_point_pair(l1, l2)?;
        let plane = fit_mean_plane(l1, l2, intersection.m)?;
        normals.push(Line3::new(
            plane.point,
            plane.normal,
            LineLabel { axis: l1.label.axis, index: 0 },
        )?);
        reports.push(AxisReport { axis: l1.label.axis, intersection: Some(intersection), plane });
    }
    let (cr, residual) = solve_center(&normals)?;
    Ok(CenterSolution { cr, residual, axes: reports })
}

/// Like [`full_solution`] but intersecting externally supplied normal
/// lines (one per axis) instead of the fitted plane normals. Per-axis
/// measurements are optional and only feed the report.
pub fn solution_with_normals(
    pairs: Option<&[(Line3, Line3); 3]>,
    normals: &[Line3; 3],
) -> Result<CenterSolution, CenterError> {
    let mut reports = Vec::with_capacity(3);
    for (k, normal) in normals.iter().enumerate() {
        let intersection = match pairs {
            Some(p) => Some(closest_point_pair(&p[k].0, &p[k].1)?),
            None => None,
        };
        reports.push(AxisReport {
            axis: normal.label.axis,
            intersection,
            plane: MeanPlane { point: normal.point, normal: normal.direction },
        });
    }
    let (cr, residual) = solve_center(normals)?;
    Ok(CenterSolution { cr, residual, axes: reports })
}

// --- measurement file -------------------------------------------------

/// On-disk center-measurement format: six (charge point, displacement)
/// records, two per axis, plus optional externally supplied normal
/// lines, origin and eigenvector for the direction-angle report. Extra
/// keys (notes, expected values) are tolerated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<CenterRecordFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_lines: Option<Vec<NormalLineFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_m: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v3: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterRecordFile {
    pub axis: Axis,
    pub index: u8,
    pub charge_point_mm: [f64; 3],
    pub displacement_m: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalLineFile {
    pub axis: Axis,
    pub point_m: [f64; 3],
    pub direction: [f64; 3],
}

/// Validated center-measurement input.
#[derive(Debug, Clone)]
pub struct CenterInput {
    pub pairs: Option<[(Line3, Line3); 3]>,
    pub normals: Option<[Line3; 3]>,
    pub origin: Point3,
    pub v3: Option<Vec3>,
}

pub fn parse_center_file(path: &std::path::Path) -> Result<CenterInput, CenterError> {
    let text = std::fs::read_to_string(path).map_err(|source| CenterError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_center_str(&text)
}

pub fn parse_center_str(text: &str) -> Result<CenterInput, CenterError> {
    let file: CenterFile =
        serde_json::from_str(text).map_err(|e| CenterError::Schema(e.to_string()))?;
    if file.schema_version != 1 {
        return Err(CenterError::Schema(format!(
            "unsupported schema_version {}",
            file.schema_version
        )));
    }

    let pairs = match &file.records {
        None => None,
        Some(records) => {
            if records.len() != 6 {
                return Err(CenterError::Schema(format!(
                    "expected 6 measurement records (two per axis), got {}",
                    records.len()
                )));
            }
            let find = |axis: Axis, index: u8| -> Result<Line3, CenterError> {
                let rec = records
                    .iter()
                    .find(|r| r.axis == axis && r.index == index)
                    .ok_or_else(|| {
                        CenterError::Schema(format!("missing record for axis {axis} index {index}"))
                    })?;
                line_from_measurement(
                    Point3::from_array(rec.charge_point_mm),
                    Vec3::from_array(rec.displacement_m),
                    LineLabel { axis, index },
                )
            };
            Some([
                (find(Axis::X, 1)?, find(Axis::X, 2)?),
                (find(Axis::Y, 1)?, find(Axis::Y, 2)?),
                (find(Axis::Z, 1)?, find(Axis::Z, 2)?),
            ])
        }
    };

    let normals = match &file.normal_lines {
        None => None,
        Some(lines) => {
            if lines.len() != 3 {
                return Err(CenterError::Schema(format!(
                    "expected 3 normal lines (one per axis), got {}",
                    lines.len()
                )));
            }
            let find = |axis: Axis| -> Result<Line3, CenterError> {
                let l = lines.iter().find(|l| l.axis == axis).ok_or_else(|| {
                    CenterError::Schema(format!("missing normal line for axis {axis}"))
                })?;
                Line3::new(
                    Point3::from_array(l.point_m),
                    Vec3::from_array(l.direction),
                    LineLabel { axis, index: 0 },
                )
            };
            Some([find(Axis::X)?, find(Axis::Y)?, find(Axis::Z)?])
        }
    };

    if pairs.is_none() && normals.is_none() {
        return Err(CenterError::Schema(
            "the file provides neither measurement records nor normal lines".into(),
        ));
    }

    Ok(CenterInput {
        pairs,
        normals,
        origin: file.origin_m.map(Point3::from_array).unwrap_or(Point3::ORIGIN),
        v3: file.v3.map(Vec3::from_array),
    })
}

/// Solves a parsed input: supplied normal lines take precedence over
/// the fitted mean-plane normals. Returns the solution and which
/// normals were used ("fitted" or "supplied").
pub fn solve_input(input: &CenterInput) -> Result<(CenterSolution, &'static str), CenterError> {
    match (&input.normals, &input.pairs) {
        (Some(normals), pairs) => {
            Ok((solution_with_normals(pairs.as_ref(), normals)?, "supplied"))
        }
        (None, Some(pairs)) => Ok((full_solution(pairs)?, "fitted")),
        (None, None) => Err(CenterError::Schema("no usable input".into())),
    }
}

/// Sign-insensitive angle (degrees, in [0°, 90°]) between an eigenvector
/// and the direction from `origin` to `cr`.
pub fn center_direction_angle(cr: Point3, v3: Vec3, origin: Point3) -> Result<f64, CenterError> {
    let dir = (cr - origin).normalized().ok_or(CenterError::ZeroVector)?;
    let v = v3.normalized().ok_or(CenterError::ZeroVector)?;
    Ok(dir.dot(v).abs().clamp(0.0, 1.0).acos().to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn label(axis: Axis, index: u8) -> LineLabel {
        LineLabel { axis, index }
    }

    fn line(p: [f64; 3], d: [f64; 3]) -> Line3 {
        Line3::new(Point3::from_array(p), Vec3::from_array(d), label(Axis::X, 1)).unwrap()
    }

    #[test]
    fn measurement_line_converts_mm_and_normalizes() {
        let l = line_from_measurement(
            Point3::new(35.0, -20.0, 52.0),
            Vec3::new(9.1e-5, 1.7e-5, 3.4e-5),
            label(Axis::X, 1),
        )
        .unwrap();
        assert_relative_eq!(l.point.x, 0.035);
        assert_relative_eq!(l.point.y, -0.020);
        assert_relative_eq!(l.point.z, 0.052);
        // hand-normalized direction
        assert_relative_eq!(l.direction.x, 0.923, epsilon = 1e-3);
        assert_relative_eq!(l.direction.y, 0.172, epsilon = 1e-3);
        assert_relative_eq!(l.direction.z, 0.345, epsilon = 1e-3);
    }

    #[test]
    fn zero_displacement_rejected() {
        assert!(matches!(
            line_from_measurement(Point3::ORIGIN, Vec3::ZERO, label(Axis::X, 1)),
            Err(CenterError::ZeroDisplacement)
        ));
    }

    #[test]
    fn intersecting_axes_meet_at_origin() {
        let lx = line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let ly = line([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let ai = closest_point_pair(&lx, &ly).unwrap();
        assert!((ai.m - Point3::ORIGIN).norm() < 1e-12);
        assert!(ai.mu < 1e-12);
        assert!(ai.theta_deg < 1e-6);
    }

    #[test]
    fn common_perpendicular_of_offset_lines() {
        // x-axis and the vertical line through (0, 1, 0)
        let l1 = line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let l2 = line([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let ai = closest_point_pair(&l1, &l2).unwrap();
        assert!((ai.m - Point3::new(0.0, 0.5, 0.0)).norm() < 1e-12);
        assert_relative_eq!(ai.mu, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn parallel_lines_flagged_with_distance() {
        let l1 = line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let l2 = line([0.0, 2.0, 0.0], [1.0, 0.0, 0.0]);
        match closest_point_pair(&l1, &l2) {
            Err(CenterError::ParallelLines { distance }) => {
                assert_relative_eq!(distance, 2.0, max_relative = 1e-12)
            }
            other => panic!("expected ParallelLines, got {other:?}"),
        }
    }

    #[test]
    fn closest_point_pair_is_symmetric() {
        let l1 = line([0.1, -0.3, 0.2], [0.8, 0.1, 0.5]);
        let l2 = line([-0.2, 0.4, 0.0], [0.1, 0.9, -0.3]);
        let a = closest_point_pair(&l1, &l2).unwrap();
        let b = closest_point_pair(&l2, &l1).unwrap();
        assert!((a.m - b.m).norm() < 1e-12);
        assert_relative_eq!(a.mu, b.mu, max_relative = 1e-12);
        assert_relative_eq!(a.theta_deg, b.theta_deg, max_relative = 1e-9);
    }

    #[test]
    fn plane_of_in_plane_lines_is_z() {
        let l1 = line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let l2 = line([0.0, 1.0, 0.0], [1.0, 1.0, 0.0]);
        let p = fit_mean_plane(&l1, &l2, Point3::ORIGIN).unwrap();
        assert!((p.normal - Vec3::Z).norm() < 1e-9);
    }

    #[test]
    fn plane_of_orthogonal_axes_is_exactly_z() {
        let l1 = line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let l2 = line([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let p = fit_mean_plane(&l1, &l2, Point3::ORIGIN).unwrap();
        assert!((p.normal - Vec3::Z).norm() < 1e-10);
    }

    #[test]
    fn mean_plane_normal_matches_sphere_grid_oracle() {
        // brute-force search over a 1° grid of the unit sphere for the
        // direction minimizing the squared direction scatter
        let l1 = line([0.035, -0.02, 0.052], [0.923, 0.172, 0.345]);
        let l2 = line([0.035, -0.02, 0.117], [0.966, 0.181, 0.178]);
        let p = fit_mean_plane(&l1, &l2, Point3::ORIGIN).unwrap();

        let mut best = (f64::INFINITY, Vec3::Z);
        let deg = std::f64::consts::PI / 180.0;
        for i in 0..180 {
            for j in 0..360 {
                let theta = i as f64 * deg;
                let phi = j as f64 * deg;
                let n = Vec3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                let cost = n.dot(l1.direction).powi(2) + n.dot(l2.direction).powi(2);
                if cost < best.0 {
                    best = (cost, n);
                }
            }
        }
        let angle = p.normal.dot(best.1).abs().clamp(0.0, 1.0).acos().to_degrees();
        assert!(angle <= 1.0, "normal {:?} is {angle:.2}° from the grid oracle", p.normal);
    }

    #[test]
    fn concurrent_lines_give_exact_center() {
        let q = Point3::new(0.3, -0.1, 0.7);
        let dirs = [
            Vec3::new(1.0, 0.2, -0.3),
            Vec3::new(-0.4, 1.0, 0.1),
            Vec3::new(0.2, -0.5, 1.0),
        ];
        let lines: Vec<Line3> = dirs
            .iter()
            .map(|d| Line3::new(q + *d * 0.4, *d, label(Axis::X, 0)).unwrap())
            .collect();
        let (cr, r) = solve_center(&lines).unwrap();
        assert!((cr - q).norm() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn offset_perpendicular_lines_match_grid_oracle() {
        // three mutually perpendicular lines, pairwise offset by δ
        let delta = 0.01;
        let lines = [
            Line3::new(Point3::new(0.0, delta, 0.0), Vec3::X, label(Axis::X, 0)).unwrap(),
            Line3::new(Point3::new(0.0, 0.0, delta), Vec3::Y, label(Axis::Y, 0)).unwrap(),
            Line3::new(Point3::new(delta, 0.0, 0.0), Vec3::Z, label(Axis::Z, 0)).unwrap(),
        ];
        let (cr, r) = solve_center(&lines).unwrap();
        // closed form: equidistant center at δ/2·(1,1,1), r = δ/√2
        assert!((cr - Point3::new(delta / 2.0, delta / 2.0, delta / 2.0)).norm() < 1e-12);
        assert_relative_eq!(r, delta / 2.0_f64.sqrt(), max_relative = 1e-12);

        // grid-refinement oracle: no grid point beats the solution
        let ss = |p: Point3| -> f64 { lines.iter().map(|l| l.distance_squared(p)).sum() };
        let best = ss(cr);
        let mut step = 4e-3;
        let mut center = cr;
        for _ in 0..3 {
            let mut improved = None;
            for ix in -2..=2 {
                for iy in -2..=2 {
                    for iz in -2..=2 {
                        let p = center
                            + Vec3::new(ix as f64 * step, iy as f64 * step, iz as f64 * step);
                        if ss(p) < best - 1e-15 {
                            improved = Some(p);
                        }
                    }
                }
            }
            assert!(improved.is_none(), "grid point beats closed-form center");
            center = cr;
            step /= 4.0;
        }
    }

    #[test]
    fn six_concurrent_measurement_lines_recover_their_center() {
        // all six measured lines pass exactly through Q: every per-axis
        // intersection is Q with zero gap, and the pipeline returns Q
        let q = Point3::new(0.4, -0.25, 0.15);
        let dirs = [
            (Vec3::new(1.0, 0.1, 0.05), Vec3::new(1.0, -0.15, 0.1)),
            (Vec3::new(0.1, 1.0, -0.08), Vec3::new(-0.05, 1.0, 0.12)),
            (Vec3::new(0.07, -0.1, 1.0), Vec3::new(-0.1, 0.06, 1.0)),
        ];
        let mut pairs = Vec::new();
        for (k, (d1, d2)) in dirs.iter().enumerate() {
            let axis = [Axis::X, Axis::Y, Axis::Z][k];
            let l1 = Line3::new(q + *d1 * 0.3, *d1, label(axis, 1)).unwrap();
            let l2 = Line3::new(q - *d2 * 0.45, *d2, label(axis, 2)).unwrap();
            pairs.push((l1, l2));
        }
        let pairs: [(Line3, Line3); 3] = [pairs[0], pairs[1], pairs[2]];
        let solution = full_solution(&pairs).unwrap();
        assert!(
            (solution.cr - q).norm() < 1e-9,
            "CR off by {:.2e}",
            (solution.cr - q).norm()
        );
        assert!(solution.residual < 1e-9);
        for axis in &solution.axes {
            let ai = axis.intersection.unwrap();
            assert!(ai.mu < 1e-9, "mu = {:.2e}", ai.mu);
            assert!((ai.m - q).norm() < 1e-9);
        }
    }

    #[test]
    fn degenerate_normals_rejected() {
        let lines = [
            Line3::new(Point3::ORIGIN, Vec3::X, label(Axis::X, 0)).unwrap(),
            Line3::new(Point3::new(0.0, 1.0, 0.0), Vec3::X, label(Axis::Y, 0)).unwrap(),
            Line3::new(Point3::new(0.0, 0.0, 1.0), Vec3::X, label(Axis::Z, 0)).unwrap(),
        ];
        assert!(matches!(
            solve_center(&lines),
            Err(CenterError::DegenerateDirections { .. })
        ));
    }

    #[test]
    fn angle_between_v3_and_center_direction() {
        let cr = Point3::new(0.0, 0.0, 2.0);
        assert_relative_eq!(
            center_direction_angle(cr, Vec3::Z, Point3::ORIGIN).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            center_direction_angle(cr, -Vec3::Z, Point3::ORIGIN).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            center_direction_angle(cr, Vec3::X, Point3::ORIGIN).unwrap(),
            90.0,
            epsilon = 1e-9
        );
        assert!(matches!(
            center_direction_angle(Point3::ORIGIN, Vec3::X, Point3::ORIGIN),
            Err(CenterError::ZeroVector)
        ));
    }
}
