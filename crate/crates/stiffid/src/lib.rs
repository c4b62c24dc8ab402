//! Static stiffness identification for turning machine systems.
//!
//! The library turns static load/displacement test campaigns into 6x6
//! stiffness matrices, per-entry error matrices, principal deformation
//! directions and the 3D stiffness (rotation) center of the tool block.
//!
//! Pipeline overview:
//!
//! 1. [`ingest`] parses a measurement campaign and converts transducer
//!    readings and load steps into small-displacement torsors (twists)
//!    and mechanical-action torsors (wrenches).
//! 2. [`fitting`] reduces charge/discharge series to one value per load
//!    level via the hysteresis midline construction.
//! 3. [`solver`] assembles the compliance matrix from six load cases,
//!    inverts it to the stiffness matrix, extracts its 3x3 blocks and
//!    computes principal deformation directions.
//! 4. [`center`] locates the stiffness center from per-axis displacement
//!    lines (skew-line closest points, mean planes, least-squares
//!    intersection).
//!
//! [`synth`] is the forward simulator used as the identification oracle,
//! and [`sizing`] holds the cantilever sizing helper for the holding
//! fixture.

pub mod center;
pub mod error;
pub mod fitting;
pub mod ingest;
pub mod plot;
pub mod report;
pub mod sizing;
pub mod solver;
pub mod synth;
pub mod torsor;

pub use error::Error;
