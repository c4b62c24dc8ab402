//! Screw-theory primitives: reference frames, wrenches (mechanical
//! action torsors), twists (small-displacement torsors) and the fixed
//! size linear algebra they need.
//!
//! Conventions used throughout the crate:
//!
//! * machine axes: x = cross direction, y = cutting axis, z = feed;
//! * a wrench packs into a 6-vector as `[F; M]`, a twist as `[ρ; ε]`,
//!   so a stiffness matrix `{T} = [K]{D}` carries the displacement
//!   block in its upper-right quadrant;
//! * every torsor records the point it is expressed at — there is no
//!   frame-free wrench or twist.

mod eig;
mod mat;
mod vec;

pub use eig::{eig3_real, Eig3, EigError, COMPLEX_TOL};
pub use mat::{Mat3, Mat6};
pub use vec::{Point3, Vec3};

use serde::{Deserialize, Serialize};

/// Rotation magnitude above which the small-displacement hypothesis is
/// considered violated and a warning should be attached to reports.
pub const SMALL_ROTATION_LIMIT: f64 = 1e-2;

/// Label for the axes a torsor is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Machine axes: x cross, y cutting, z feed.
    #[default]
    Machine,
}

/// Mechanical action torsor: force and moment expressed at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    /// Force components (N).
    pub force: Vec3,
    /// Moment components at `at` (N·m).
    pub moment: Vec3,
    /// Point the torsor is expressed at (m).
    pub at: Point3,
    pub axes: Frame,
}

/// Small-displacement torsor: rotation and translation at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    /// Rotations ρx, ρy, ρz (rad).
    pub rotation: Vec3,
    /// Translations εx, εy, εz at `at` (m).
    pub translation: Vec3,
    /// Point the torsor is expressed at (m).
    pub at: Point3,
    pub axes: Frame,
}

impl Wrench {
    pub fn new(force: Vec3, moment: Vec3, at: Point3) -> Self {
        Wrench { force, moment, at, axes: Frame::Machine }
    }

    pub fn is_finite(&self) -> bool {
        self.force.is_finite() && self.moment.is_finite() && self.at.is_finite()
    }

    /// `[F; M]` packing used by the 6x6 identification.
    pub fn as_vector(&self) -> [f64; 6] {
        let f = self.force;
        let m = self.moment;
        [f.x, f.y, f.z, m.x, m.y, m.z]
    }
}

impl Twist {
    pub fn new(rotation: Vec3, translation: Vec3, at: Point3) -> Self {
        Twist { rotation, translation, at, axes: Frame::Machine }
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.is_finite() && self.translation.is_finite() && self.at.is_finite()
    }

    /// `[ρ; ε]` packing used by the 6x6 identification.
    pub fn as_vector(&self) -> [f64; 6] {
        let r = self.rotation;
        let t = self.translation;
        [r.x, r.y, r.z, t.x, t.y, t.z]
    }

    pub fn from_vector(v: &[f64; 6], at: Point3) -> Self {
        Twist::new(
            Vec3::new(v[0], v[1], v[2]),
            Vec3::new(v[3], v[4], v[5]),
            at,
        )
    }

    /// True when a rotation component exceeds the small-displacement
    /// hypothesis limit.
    pub fn exceeds_small_rotation(&self) -> bool {
        self.rotation.x.abs() > SMALL_ROTATION_LIMIT
            || self.rotation.y.abs() > SMALL_ROTATION_LIMIT
            || self.rotation.z.abs() > SMALL_ROTATION_LIMIT
    }
}

/// Complete mechanical action torsor of a point force: the moment at
/// `expressed_at` is the lever arm from that point crossed with `force`.
pub fn wrench_from_point_force(force: Vec3, applied_at: Point3, expressed_at: Point3) -> Wrench {
    let lever = applied_at - expressed_at;
    Wrench::new(force, lever.cross(force), expressed_at)
}

/// Varignon transport: force is invariant, `M_to = M_at + (at − to) × F`.
pub fn transport_wrench(w: &Wrench, to: Point3) -> Wrench {
    let lever = w.at - to;
    Wrench {
        force: w.force,
        moment: w.moment + lever.cross(w.force),
        at: to,
        axes: w.axes,
    }
}

/// Small-displacement field transport: rotation is invariant,
/// `ε_to = ε_at + ρ × (to − at)`.
pub fn transport_twist(t: &Twist, to: Point3) -> Twist {
    let lever = to - t.at;
    Twist {
        rotation: t.rotation,
        translation: t.translation + t.rotation.cross(lever),
        at: to,
        axes: t.axes,
    }
}
