//! Synthetic ground truth: field landmark catalogs, camera poses, pinhole
//! projection, and seeded observation generation.
//!
//! Everything here is deterministic given its inputs and seed, which makes
//! the generated observations usable as oracles for round-trip tests.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gravity::{CameraIntrinsics, ImageSegment};
use crate::rt::Vec3;

/// A vertical 3D segment, e.g. one outer edge of a goal post.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment3 {
    pub a: Vec3,
    pub b: Vec3,
}

/// Named ground-plane landmarks plus optional vertical structures for
/// gravity estimation. All landmarks live at z = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldModel {
    /// Landmark id → (x, y) in meters.
    pub landmarks: BTreeMap<String, [f64; 2]>,
    /// Pairs of parallel vertical edges usable for the vanishing point.
    pub verticals: Vec<[Segment3; 2]>,
}

impl FieldModel {
    pub fn new(landmarks: BTreeMap<String, [f64; 2]>) -> FieldModel {
        FieldModel {
            landmarks,
            verticals: Vec::new(),
        }
    }

    /// World position of a landmark, on the ground plane.
    pub fn landmark(&self, id: &str) -> Result<Vec3> {
        self.landmarks
            .get(id)
            .map(|p| Vec3::new(p[0], p[1], 0.0))
            .ok_or_else(|| Error::UnknownLandmark(id.to_string()))
    }

    /// Replaces the vertical structures with a goal-post pair standing on
    /// the line `x = goal_x`, outer edges at `y = ±half_span`, `height`
    /// meters tall.
    pub fn with_goal_posts(mut self, goal_x: f64, half_span: f64, height: f64) -> FieldModel {
        self.verticals = vec![[
            Segment3 {
                a: Vec3::new(goal_x, -half_span, 0.0),
                b: Vec3::new(goal_x, -half_span, height),
            },
            Segment3 {
                a: Vec3::new(goal_x, half_span, 0.0),
                b: Vec3::new(goal_x, half_span, height),
            },
        ]];
        self
    }
}

/// Built-in field catalogs. `spl_center` holds the two X-intersections of
/// the middle line with the center circle (1.5 m apart); `slam2004` and
/// `slam2005` hold the taped marker points of the 2004/2005 SLAM challenges
/// (converted from the published centimeter coordinates). Every catalog
/// carries a default goal-post pair for vanishing-point work.
pub fn builtin_field(name: &str) -> Option<FieldModel> {
    let mut landmarks = BTreeMap::new();
    match name {
        "spl_center" => {
            landmarks.insert("x1".to_string(), [0.0, 0.75]);
            landmarks.insert("x2".to_string(), [0.0, -0.75]);
        }
        "slam2004" => {
            let pts = [
                (1.60, 1.00),
                (1.80, -0.30),
                (0.50, -1.00),
                (-2.10, 0.00),
                (-1.00, 0.50),
            ];
            for (i, (x, y)) in pts.iter().enumerate() {
                landmarks.insert(format!("red{}", i + 1), [*x, *y]);
            }
        }
        "slam2005" => {
            let pts = [
                (1.30, 1.20),
                (2.20, -1.50),
                (-1.60, -1.20),
                (-2.10, 0.90),
                (2.70, 0.00),
            ];
            for (i, (x, y)) in pts.iter().enumerate() {
                landmarks.insert(format!("black{}", i + 1), [*x, *y]);
            }
        }
        _ => return None,
    }
    // SPL goal: posts on the goal line, outer edges 1.7 m apart, 0.8 m tall.
    Some(FieldModel::new(landmarks).with_goal_posts(4.5, 0.85, 0.8))
}

pub fn builtin_field_names() -> [&'static str; 3] {
    ["spl_center", "slam2004", "slam2005"]
}

/// Row-major 3×3 rotation. Rows are the camera axes expressed in world
/// coordinates, so `apply` maps world vectors into the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub rows: [[f64; 3]; 3],
}

impl Rotation {
    pub fn from_rows(x: Vec3, y: Vec3, z: Vec3) -> Result<Rotation> {
        let r = Rotation {
            rows: [[x.x, x.y, x.z], [y.x, y.y, y.z], [z.x, z.y, z.z]],
        };
        if !r.is_orthonormal(1e-12) {
            return Err(Error::InvalidRotation);
        }
        Ok(r)
    }

    fn row(&self, i: usize) -> Vec3 {
        Vec3::new(self.rows[i][0], self.rows[i][1], self.rows[i][2])
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                let d = self.row(i).dot(self.row(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                if (d - expect).abs() > tol {
                    return false;
                }
            }
        }
        // Right-handed: x × y = z.
        (self.row(0).cross(self.row(1)) - self.row(2)).norm() <= tol.sqrt()
    }

    /// World → camera.
    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    /// Camera → world (transpose).
    pub fn apply_inverse(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.rows[0][0] * v.x + self.rows[1][0] * v.y + self.rows[2][0] * v.z,
            self.rows[0][1] * v.x + self.rows[1][1] * v.y + self.rows[2][1] * v.z,
            self.rows[0][2] * v.x + self.rows[1][2] * v.y + self.rows[2][2] * v.z,
        )
    }
}

/// Camera position and orientation. Camera frame convention: x right,
/// y down, z along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub position: Vec3,
    pub rotation: Rotation,
}

impl CameraPose {
    pub fn new(position: Vec3, rotation: Rotation) -> Result<CameraPose> {
        if !position.z.is_finite() || position.z <= 0.0 {
            return Err(Error::Degenerate("camera height must be positive"));
        }
        Ok(CameraPose { position, rotation })
    }

    /// Pose at `position` with the optical axis toward `target`. Keeps the
    /// image x-axis level; when looking straight up or down, the image
    /// x-axis falls back to the world x-axis.
    pub fn looking_at(position: Vec3, target: Vec3) -> Result<CameraPose> {
        let forward = (target - position).normalized()?;
        let world_up = Vec3::new(0.0, 0.0, 1.0);
        let mut x_axis = forward.cross(world_up);
        if x_axis.norm_squared() < 1e-24 {
            x_axis = forward.cross(Vec3::new(0.0, 1.0, 0.0));
        }
        let x_axis = x_axis.normalized()?;
        let y_axis = forward.cross(x_axis).normalized()?;
        CameraPose::new(position, Rotation::from_rows(x_axis, y_axis, forward)?)
    }

    /// World point in camera coordinates.
    pub fn to_camera(&self, world_point: Vec3) -> Vec3 {
        self.rotation.apply(world_point - self.position)
    }

    /// True gravity direction in the camera frame (world −z transported).
    pub fn gravity_in_camera(&self) -> Vec3 {
        self.rotation.apply(Vec3::new(0.0, 0.0, -1.0))
    }
}

/// Pinhole projection of a world point, erroring when the point is not in
/// front of the camera.
pub fn project(pose: &CameraPose, world_point: Vec3, k: &CameraIntrinsics) -> Result<[f64; 2]> {
    let p = pose.to_camera(world_point);
    if p.z <= 0.0 {
        return Err(Error::BehindCamera(p.z));
    }
    Ok([k.cx + k.fx * p.x / p.z, k.cy + k.fy * p.y / p.z])
}

/// How an observation reports the gravity direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityMode {
    /// Attach the true camera-frame gravity vector directly (IMU path).
    Direct,
    /// Attach projected vertical segments; the solver recovers gravity from
    /// their vanishing point.
    Verticals,
}

/// Pixel noise and gravity reporting for [`make_observation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of isotropic Gaussian pixel noise, in pixels.
    pub pixel_std: f64,
    pub gravity_mode: GravityMode,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            pixel_std: 0.0,
            gravity_mode: GravityMode::Direct,
        }
    }
}

/// Two landmark sightings plus a gravity cue, the solver's input.
///
/// Exactly one of `bearings` or `pixels` (with `intrinsics`) must be
/// present; landmark order is significant — the first id pairs with the
/// first bearing/pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(rename = "landmarks")]
    pub landmark_ids: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bearings: Option<[Vec3; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixels: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsics: Option<CameraIntrinsics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertical_segments: Option<[ImageSegment; 2]>,
}

impl Observation {
    /// Checks the structural invariants: distinct landmarks, exactly one
    /// bearing source, and at least one gravity cue.
    pub fn validate(&self) -> Result<()> {
        if self.landmark_ids[0] == self.landmark_ids[1] {
            return Err(Error::DuplicateLandmark(self.landmark_ids[0].clone()));
        }
        match (&self.bearings, &self.pixels) {
            (Some(_), None) => {}
            (None, Some(_)) if self.intrinsics.is_some() => {}
            (None, Some(_)) => return Err(Error::MissingIntrinsics),
            _ => return Err(Error::AmbiguousObservation),
        }
        if self.gravity.is_none() && self.vertical_segments.is_none() {
            return Err(Error::MissingGravity);
        }
        if self.vertical_segments.is_some() && self.gravity.is_none() && self.intrinsics.is_none()
        {
            return Err(Error::MissingIntrinsics);
        }
        Ok(())
    }

    /// Camera-frame bearings toward the two landmarks, in landmark order.
    pub fn bearing_vectors(&self) -> Result<[Vec3; 2]> {
        if let Some(b) = &self.bearings {
            return Ok(*b);
        }
        let (Some(px), Some(k)) = (&self.pixels, &self.intrinsics) else {
            return Err(Error::AmbiguousObservation);
        };
        Ok([k.back_project(px[0]), k.back_project(px[1])])
    }
}

/// Projects two landmarks from `pose`, optionally perturbing pixels with
/// seeded Gaussian noise, and attaches the gravity cue chosen by `noise`.
///
/// Deterministic: the same arguments and seed always produce the identical
/// observation.
pub fn make_observation(
    pose: &CameraPose,
    ids: [&str; 2],
    field: &FieldModel,
    k: &CameraIntrinsics,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<Observation> {
    if ids[0] == ids[1] {
        return Err(Error::DuplicateLandmark(ids[0].to_string()));
    }
    let p1 = field.landmark(ids[0])?;
    let p2 = field.landmark(ids[1])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturb = |uv: [f64; 2]| -> [f64; 2] {
        if noise.pixel_std > 0.0 {
            let n = Normal::new(0.0, noise.pixel_std).expect("finite std");
            [uv[0] + n.sample(&mut rng), uv[1] + n.sample(&mut rng)]
        } else {
            uv
        }
    };
    let px1 = perturb(project(pose, p1, k)?);
    let px2 = perturb(project(pose, p2, k)?);

    let mut obs = Observation {
        landmark_ids: [ids[0].to_string(), ids[1].to_string()],
        bearings: None,
        pixels: Some([px1, px2]),
        intrinsics: Some(*k),
        gravity: None,
        vertical_segments: None,
    };
    match noise.gravity_mode {
        GravityMode::Direct => {
            obs.gravity = Some(pose.gravity_in_camera());
        }
        GravityMode::Verticals => {
            let pair = field.verticals.first().ok_or(Error::NoVerticals)?;
            let mut segments = [ImageSegment::new([0.0, 0.0], [1.0, 1.0])?; 2];
            for (i, seg) in pair.iter().enumerate() {
                let a = perturb(project(pose, seg.a, k)?);
                let b = perturb(project(pose, seg.b, k)?);
                segments[i] = ImageSegment::new(a, b)?;
            }
            obs.vertical_segments = Some(segments);
        }
    }
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_matches_published_markers() {
        let f = builtin_field("slam2004").unwrap();
        assert_eq!(f.landmark("red1").unwrap(), Vec3::new(1.60, 1.00, 0.0));
        let f = builtin_field("slam2005").unwrap();
        assert_eq!(f.landmark("black5").unwrap(), Vec3::new(2.70, 0.00, 0.0));
        let f = builtin_field("spl_center").unwrap();
        let q = crate::rt::quadrance(f.landmark("x1").unwrap(), f.landmark("x2").unwrap());
        assert_eq!(q.value(), 2.25);
        assert!(builtin_field("nonsense").is_none());
    }

    #[test]
    fn nadir_projection() {
        let pose = CameraPose::looking_at(Vec3::new(0.0, 0.0, 0.5), Vec3::ZERO).unwrap();
        let k = CameraIntrinsics::default();
        let uv = project(&pose, Vec3::new(0.1, 0.0, 0.0), &k).unwrap();
        assert!((uv[0] - 440.0).abs() < 1e-9);
        assert!((uv[1] - 240.0).abs() < 1e-9);
        let uv = project(&pose, Vec3::ZERO, &k).unwrap();
        assert_eq!(uv, [320.0, 240.0]);
    }

    #[test]
    fn behind_camera_is_an_error() {
        let pose = CameraPose::looking_at(Vec3::new(0.0, 0.0, 0.5), Vec3::new(1.0, 0.0, 0.0))
            .unwrap();
        let r = project(&pose, Vec3::new(-1.0, 0.0, 0.0), &CameraIntrinsics::default());
        assert!(matches!(r, Err(Error::BehindCamera(_))));
    }

    #[test]
    fn projection_back_projection_parallel() {
        let pose = CameraPose::looking_at(Vec3::new(-1.0, 0.4, 0.5), Vec3::new(0.5, 0.0, 0.0))
            .unwrap();
        let k = CameraIntrinsics::default();
        for p in [
            Vec3::new(0.0, 0.75, 0.0),
            Vec3::new(0.3, -0.4, 0.0),
            Vec3::new(1.0, 0.2, 0.3),
        ] {
            let cam = pose.to_camera(p);
            let uv = project(&pose, p, &k).unwrap();
            let ray = k.back_project(uv);
            let cos = ray.dot(cam) / (ray.norm() * cam.norm());
            assert!((cos - 1.0).abs() < 1e-12, "not parallel: cos = {cos}");
        }
    }

    #[test]
    fn observation_is_deterministic_per_seed() {
        let pose = CameraPose::looking_at(Vec3::new(1.0, 0.2, 0.5), Vec3::ZERO).unwrap();
        let field = builtin_field("spl_center").unwrap();
        let k = CameraIntrinsics::default();
        let noise = NoiseSpec {
            pixel_std: 0.5,
            gravity_mode: GravityMode::Direct,
        };
        let a = make_observation(&pose, ["x1", "x2"], &field, &k, &noise, 7).unwrap();
        let b = make_observation(&pose, ["x1", "x2"], &field, &k, &noise, 7).unwrap();
        assert_eq!(a, b);
        let c = make_observation(&pose, ["x1", "x2"], &field, &k, &noise, 8).unwrap();
        assert_ne!(a.pixels, c.pixels);

        // Noise leaves the noiseless projection alone.
        let clean = NoiseSpec::default();
        let d = make_observation(&pose, ["x1", "x2"], &field, &k, &clean, 7).unwrap();
        let e = make_observation(&pose, ["x1", "x2"], &field, &k, &clean, 8).unwrap();
        assert_eq!(d.pixels, e.pixels);
    }

    #[test]
    fn field_model_json_round_trip() {
        let field = builtin_field("slam2004").unwrap();
        let text = serde_json::to_string(&field).unwrap();
        let back: FieldModel = serde_json::from_str(&text).unwrap();
        assert_eq!(field, back);
        // BTreeMap keys serialize sorted, so dumps are stable.
        let again = serde_json::to_string(&back).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn observation_validation() {
        let mut obs = Observation {
            landmark_ids: ["x1".into(), "x1".into()],
            bearings: Some([Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.1, 0.0, 1.0)]),
            pixels: None,
            intrinsics: None,
            gravity: Some(Vec3::new(0.0, 1.0, 0.0)),
            vertical_segments: None,
        };
        assert!(matches!(
            obs.validate(),
            Err(Error::DuplicateLandmark(_))
        ));
        obs.landmark_ids = ["x1".into(), "x2".into()];
        assert!(obs.validate().is_ok());
        obs.gravity = None;
        assert_eq!(obs.validate(), Err(Error::MissingGravity));
    }
}
