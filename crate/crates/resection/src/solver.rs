//! Camera position from two known ground points plus gravity.
//!
//! The camera apex, the two observed ground points, and the foot of the
//! vertical altitude form a tetrahedron with two right angles. Its measured
//! quantities — the quadrance between the ground points, the spreads of
//! both bearings against gravity, and the mutual bearing spread — determine
//! the altitude quadrance `H` and the foot coordinates `(X, Y)` in the
//! local frame (first point at the origin, y-axis toward the second point).
//!
//! Two interchangeable backends solve the same system: the rational one
//! works entirely in quadrances and spreads with `+ − × ÷ √` and performs
//! zero transcendental calls; the classical one deliberately routes through
//! angles and cosines, paying the usual `acos`/`cos`/`sin` tax, as a
//! baseline for the speed comparison.
//!
//! The squared forms discard two signs that are reconstructed separately:
//! the lateral (mirror) sign comes from the triple product of the bearings
//! with gravity, and the along-axis sign from the un-squared numerator of
//! the classical y equation. The shared square root is taken with the sign
//! of the inter-bearing cosine, which keeps both backends exact in the
//! obtuse regime as well.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gravity::{self, GravityDirection};
use crate::rt::{quadrance, sign_of, Quadrance, SignedSpread, Spread, Vec3};
use crate::scene::{FieldModel, Observation};

/// Relative threshold on the solver denominator below which the tetrahedron
/// has collapsed (coincident bearings or camera at ground level).
const DEGENERACY_EPS: f64 = 1e-12;

/// Which solver formulation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Rational,
    Classical,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Rational => write!(f, "rational"),
            Backend::Classical => write!(f, "classical"),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rational" => Ok(Backend::Rational),
            "classical" => Ok(Backend::Classical),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// The solver input: everything measured about the tetrahedron.
///
/// Invariants: `base_quadrance > 0`; the gravity spreads lie in [0, 1) —
/// a spread of exactly 1 means a horizontal bearing that never meets the
/// ground; `lateral_sign ∈ {−1, 0, +1}` is the sign of `(b1 × b2)·g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetrahedronMeasurement {
    /// Quadrance between the two ground points (m²).
    pub base_quadrance: Quadrance,
    /// Spread of the first bearing against gravity.
    pub gravity_spread1: Spread,
    /// Spread of the second bearing against gravity.
    pub gravity_spread2: Spread,
    /// Signed spread between the two bearings.
    pub bearing_spread: SignedSpread,
    /// Mirror disambiguation: which side of the landmark line the camera is on.
    pub lateral_sign: i8,
}

/// Solver output in the local frame: squared coordinates of the altitude
/// foot plus the altitude quadrance, with the reconstructed signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSolution {
    /// Squared offset perpendicular to the ground-point axis (m²).
    pub cross_q: Quadrance,
    /// Squared offset along the axis from the first point (m²).
    pub along_q: Quadrance,
    /// Altitude quadrance (m²).
    pub height_q: Quadrance,
    pub cross_sign: i8,
    pub along_sign: i8,
    pub backend: Backend,
}

impl LocalSolution {
    /// Signed local coordinates in meters: the camera sits at
    /// `(±√X, ±√Y, √H)` in the frame with the first ground point at the
    /// origin and the y-axis toward the second.
    pub fn local_position(&self) -> [f64; 3] {
        [
            self.cross_sign as f64 * self.cross_q.distance(),
            self.along_sign as f64 * self.along_q.distance(),
            self.height_q.distance(),
        ]
    }
}

/// A camera position in the requested frame, with the height plausibility
/// verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseEstimate {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    pub backend: Backend,
    pub height_ok: bool,
}

/// Open interval of plausible camera heights, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightRange {
    pub min_h: f64,
    pub max_h: f64,
}

impl HeightRange {
    pub fn new(min_h: f64, max_h: f64) -> Result<HeightRange> {
        if !(0.0 < min_h && min_h < max_h) {
            return Err(Error::InvalidHeightRange);
        }
        Ok(HeightRange { min_h, max_h })
    }
}

/// Shared pieces of both backends: the squared cosines, the signed root and
/// the denominator, with the degeneracy checks applied.
struct SolverTerms {
    /// cos²α1 = 1 − p1.
    c1_sq: f64,
    /// cos²α2 = 1 − p2.
    c2_sq: f64,
    /// Mutual spread q12.
    q12: f64,
    /// σ·√((1−p1)(1−p2)(1−q12)), σ the sign of cos β12.
    signed_root: f64,
    /// (1−p1) + (1−p2) − 2·signed_root.
    denominator: f64,
    base_q: f64,
}

fn prepare(m: &TetrahedronMeasurement) -> Result<SolverTerms> {
    if m.base_quadrance.value() <= 0.0 {
        return Err(Error::Degenerate("ground points coincide"));
    }
    let c1_sq = 1.0 - m.gravity_spread1.value();
    let c2_sq = 1.0 - m.gravity_spread2.value();
    if c1_sq == 0.0 || c2_sq == 0.0 {
        return Err(Error::HorizontalBearing);
    }
    let q12 = m.bearing_spread.value();
    let sigma = m.bearing_spread.cosine_sign as f64;
    let signed_root = sigma * (c1_sq * c2_sq * (1.0 - q12)).max(0.0).sqrt();
    let denominator = c1_sq + c2_sq - 2.0 * signed_root;
    if denominator <= DEGENERACY_EPS * (c1_sq + c2_sq) {
        return Err(Error::Degenerate(
            "bearings coincide or camera at ground level",
        ));
    }
    Ok(SolverTerms {
        c1_sq,
        c2_sq,
        q12,
        signed_root,
        denominator,
        base_q: m.base_quadrance.value(),
    })
}

/// Rational backend. Pure quadrance/spread arithmetic; the only non-field
/// operation is the square root inside the shared term. No transcendental
/// function is called anywhere on this path.
pub fn solve_rational(m: &TetrahedronMeasurement) -> Result<LocalSolution> {
    let t = prepare(m)?;
    let denom_sq = t.denominator * t.denominator;

    let height_q = t.c1_sq * t.c2_sq / t.denominator * t.base_q;

    // Gram determinant of the three directions; non-negative for any
    // realizable measurement, clamped against rounding at the coplanar edge.
    let gram = (t.q12 - t.c1_sq - t.c2_sq + 2.0 * t.signed_root).max(0.0);
    let cross_q = t.c1_sq * t.c2_sq * gram / denom_sq * t.base_q;

    let along_num = t.c2_sq - t.signed_root;
    let along_q = along_num * along_num / denom_sq * t.base_q;

    Ok(LocalSolution {
        cross_q: Quadrance::new_unchecked(cross_q),
        along_q: Quadrance::new_unchecked(along_q),
        height_q: Quadrance::new_unchecked(height_q),
        cross_sign: m.lateral_sign,
        along_sign: sign_of(along_num),
        backend: Backend::Rational,
    })
}

/// Classical backend. Converts the spreads to angles and evaluates the
/// distance/angle formulation, calling `cos`/`sin` afresh inside each of
/// the three coordinate equations the way the formulation is written.
/// Agrees with [`solve_rational`] to around the 12th decimal.
pub fn solve_classical(m: &TetrahedronMeasurement) -> Result<LocalSolution> {
    let t = prepare(m)?;

    let alpha1 = t.c1_sq.sqrt().acos();
    let alpha2 = t.c2_sq.sqrt().acos();
    let beta12 =
        (m.bearing_spread.cosine_sign as f64 * (1.0 - t.q12).max(0.0).sqrt()).acos();
    let base = t.base_q.sqrt();

    // x: lateral offset magnitude.
    let (ca1, ca2, cb, sb) = (alpha1.cos(), alpha2.cos(), beta12.cos(), beta12.sin());
    let denom = ca1 * ca1 + ca2 * ca2 - 2.0 * ca1 * ca2 * cb;
    let gram = (sb * sb - ca1 * ca1 - ca2 * ca2 + 2.0 * ca1 * ca2 * cb).max(0.0);
    let x = ca1 * ca2 * gram.sqrt() / denom * base;

    // y: signed offset along the ground-point axis.
    let (ca1, ca2, cb) = (alpha1.cos(), alpha2.cos(), beta12.cos());
    let y = (ca2 * ca2 - ca1 * ca2 * cb) / denom * base;

    // h: camera height.
    let (ca1, ca2, cb) = (alpha1.cos(), alpha2.cos(), beta12.cos());
    let h = ca1 * ca2 / (ca1 * ca1 + ca2 * ca2 - 2.0 * ca1 * ca2 * cb).sqrt() * base;

    Ok(LocalSolution {
        cross_q: Quadrance::new_unchecked(x * x),
        along_q: Quadrance::new_unchecked(y * y),
        height_q: Quadrance::new_unchecked(h * h),
        cross_sign: m.lateral_sign,
        along_sign: sign_of(y),
        backend: Backend::Classical,
    })
}

/// Places the local solution into world coordinates.
///
/// The local frame is anchored with its origin at `p1_world`, its y-axis
/// toward `p2_world`, z up, and x completing a right-handed frame. Both
/// anchor points must lie on the ground plane.
pub fn to_world(local: &LocalSolution, p1_world: Vec3, p2_world: Vec3) -> Result<PoseEstimate> {
    if p1_world.z.abs() > 1e-12 || p2_world.z.abs() > 1e-12 {
        return Err(Error::Degenerate("anchor points must lie on the ground plane"));
    }
    if quadrance(p1_world, p2_world).value() == 0.0 {
        return Err(Error::Degenerate("anchor points coincide"));
    }
    let y_axis = (p2_world - p1_world).normalized()?;
    let z_axis = Vec3::new(0.0, 0.0, 1.0);
    let x_axis = y_axis.cross(z_axis);
    let [lx, ly, lh] = local.local_position();
    let p = p1_world + x_axis * lx + y_axis * ly + z_axis * lh;
    Ok(PoseEstimate {
        x: p.x,
        y: p.y,
        h: p.z,
        backend: local.backend,
        height_ok: true,
    })
}

/// Applies the height plausibility band: `height_ok` becomes true exactly
/// when `min_h < h < max_h` (strict on both ends). Coordinates are left
/// untouched.
pub fn height_filter(mut p: PoseEstimate, r: &HeightRange) -> PoseEstimate {
    p.height_ok = r.min_h < p.h && p.h < r.max_h;
    p
}

/// Local-frame solve of an observation: builds the tetrahedron measurement
/// (recovering gravity from the vertical segments when no direct vector is
/// given) and runs the chosen backend. Returns the local solution together
/// with the two anchor points for frame transport. The first landmark id
/// pairs with the first bearing.
pub fn local_from_observation(
    obs: &Observation,
    field: &FieldModel,
    backend: Backend,
) -> Result<(LocalSolution, Vec3, Vec3)> {
    obs.validate()?;
    let [b1, b2] = obs.bearing_vectors()?;
    let g = match obs.gravity {
        Some(v) => GravityDirection::new(v)?,
        None => {
            let segments = obs.vertical_segments.as_ref().ok_or(Error::MissingGravity)?;
            let k = obs.intrinsics.as_ref().ok_or(Error::MissingIntrinsics)?;
            let vp = gravity::vanishing_point(&segments[0], &segments[1])?;
            gravity::gravity_from_vp(vp, k, gravity::default_down_hint())?
        }
    };
    let (p1s, p2s, q12, lateral_sign) = gravity::spreads_vs_gravity(b1, b2, &g)?;
    let p1_world = field.landmark(&obs.landmark_ids[0])?;
    let p2_world = field.landmark(&obs.landmark_ids[1])?;
    let measurement = TetrahedronMeasurement {
        base_quadrance: quadrance(p1_world, p2_world),
        gravity_spread1: p1s,
        gravity_spread2: p2s,
        bearing_spread: q12,
        lateral_sign,
    };
    let local = match backend {
        Backend::Rational => solve_rational(&measurement),
        Backend::Classical => solve_classical(&measurement),
    }?;
    Ok((local, p1_world, p2_world))
}

/// End-to-end solve: bearings and a gravity cue in, filtered world pose out.
pub fn solve_from_observation(
    obs: &Observation,
    field: &FieldModel,
    range: &HeightRange,
    backend: Backend,
) -> Result<PoseEstimate> {
    let (local, p1_world, p2_world) = local_from_observation(obs, field, backend)?;
    let pose = to_world(&local, p1_world, p2_world)?;
    Ok(height_filter(pose, range))
}
