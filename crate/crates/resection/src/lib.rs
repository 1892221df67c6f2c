//! Camera position from two known ground points and the direction of
//! gravity.
//!
//! A camera that sees two points of known separation on the ground plane,
//! and that knows which way gravity points, sits at the apex of a
//! tetrahedron whose remaining dimensions are fully determined. This crate
//! solves that tetrahedron for the camera position `(x, y, h)` with two
//! interchangeable backends — one in rational trigonometry (quadrances and
//! spreads, no transcendental calls) and one in classical trigonometry —
//! and ships the surrounding apparatus: gravity estimation from the
//! vanishing point of vertical structures, a three-point comparison solver,
//! a synthetic scene generator, embedded SLAM-challenge fixtures, and the
//! speed/accuracy harness comparing the backends.
//!
//! Module map:
//! - [`rt`] — quadrance/spread primitives and the spread and cross laws.
//! - [`solver`] — the tetrahedron solver, both backends, frame transport,
//!   height filtering, and the end-to-end observation pipeline.
//! - [`gravity`] — vanishing points, gravity from verticals, spread
//!   extraction.
//! - [`p3p`] — three-point distance solver for cross-checks.
//! - [`scene`] — field catalogs, pinhole projection, observation synthesis.
//! - [`fixtures`] — embedded challenge recordings and published statistics.
//! - [`eval`] — benchmark loops, error statistics, batch sweeps (rayon
//!   under the `parallel` feature, sequential fallback without it).

pub mod error;
pub mod eval;
pub mod fixtures;
pub mod gravity;
pub mod p3p;
pub mod rt;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
pub use gravity::{CameraIntrinsics, GravityDirection, ImageSegment};
pub use rt::{Quadrance, SignedSpread, Spread, Vec3};
pub use scene::{CameraPose, FieldModel, Observation};
pub use solver::{
    Backend, HeightRange, LocalSolution, PoseEstimate, TetrahedronMeasurement,
};
