//! Gravity direction from the image, plus the spread extraction that feeds
//! the pose solver.
//!
//! Two vertical structures (goal-post edges) project to image lines whose
//! intersection — the vanishing point of the vertical direction — encodes
//! gravity in the camera frame. An IMU-style gravity vector can bypass this
//! and enter the pipeline directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rt::{sign_of, spread_between, SignedSpread, Spread, Vec3};

/// Relative threshold on the homogeneous w-component below which two image
/// lines are treated as parallel.
const PARALLEL_TOL: f64 = 1e-9;

/// A straight segment in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSegment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl ImageSegment {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Result<ImageSegment> {
        if a == b {
            return Err(Error::DegenerateSegment);
        }
        Ok(ImageSegment { a, b })
    }

    /// Homogeneous line through the two endpoints, normalized to unit length.
    fn line(&self) -> Result<[f64; 3]> {
        let pa = [self.a[0], self.a[1], 1.0];
        let pb = [self.b[0], self.b[1], 1.0];
        let l = cross3(pa, pb);
        let n = (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]).sqrt();
        if n == 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Ok([l[0] / n, l[1] / n, l[2] / n])
    }
}

/// Pinhole intrinsics: focal lengths and principal point, all in pixels.
/// Zero skew, no lens distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<CameraIntrinsics> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::InvalidIntrinsics);
        }
        Ok(CameraIntrinsics { fx, fy, cx, cy })
    }

    /// Camera-frame ray through a pixel, with unit depth component.
    pub fn back_project(&self, pixel: [f64; 2]) -> Vec3 {
        Vec3::new(
            (pixel[0] - self.cx) / self.fx,
            (pixel[1] - self.cy) / self.fy,
            1.0,
        )
    }
}

impl Default for CameraIntrinsics {
    /// Representative low-resolution robot camera.
    fn default() -> Self {
        CameraIntrinsics {
            fx: 600.0,
            fy: 600.0,
            cx: 320.0,
            cy: 240.0,
        }
    }
}

/// Unit-length gravity direction in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityDirection {
    v: Vec3,
}

impl GravityDirection {
    pub fn new(v: Vec3) -> Result<GravityDirection> {
        Ok(GravityDirection {
            v: v.normalized()?,
        })
    }

    pub fn vector(&self) -> Vec3 {
        self.v
    }
}

/// Default sign hint for [`gravity_from_vp`]: image-down plus forward, the
/// rough down direction for a camera pitched toward the ground.
pub fn default_down_hint() -> Vec3 {
    Vec3::new(0.0, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Intersection of the two infinite lines through the given segments, in
/// pixels. Lines and their meet are formed with homogeneous cross products.
///
/// Errors with [`Error::ParallelLines`] when no finite intersection exists.
pub fn vanishing_point(s1: &ImageSegment, s2: &ImageSegment) -> Result<[f64; 2]> {
    let l1 = s1.line()?;
    let l2 = s2.line()?;
    let p = cross3(l1, l2);
    let scale = p[0].abs().max(p[1].abs()).max(p[2].abs());
    if scale == 0.0 || p[2].abs() < PARALLEL_TOL * scale {
        return Err(Error::ParallelLines);
    }
    Ok([p[0] / p[2], p[1] / p[2]])
}

/// Gravity direction from the vanishing point of vertical structures.
///
/// The ray through the vanishing point is parallel to the 3D vertical
/// direction; `down_hint` picks which of the two opposite orientations
/// points toward the ground.
pub fn gravity_from_vp(
    vp: [f64; 2],
    k: &CameraIntrinsics,
    down_hint: Vec3,
) -> Result<GravityDirection> {
    let d = k.back_project(vp).normalized()?;
    let hint = down_hint.normalized()?;
    let alignment = d.dot(hint);
    if alignment.abs() < 1e-9 {
        return Err(Error::AmbiguousSign);
    }
    let v = if alignment < 0.0 { -d } else { d };
    GravityDirection::new(v)
}

/// Spread extraction for the tetrahedron solver: the spreads of both
/// bearings against gravity, the mutual signed spread, and the lateral sign
/// `sign((b1 × b2)·g)` that fixes which side of the landmark line the camera
/// occupies.
pub fn spreads_vs_gravity(
    b1: Vec3,
    b2: Vec3,
    g: &GravityDirection,
) -> Result<(Spread, Spread, SignedSpread, i8)> {
    let p1 = spread_between(b1, g.vector())?.spread;
    let p2 = spread_between(b2, g.vector())?.spread;
    let q12 = spread_between(b1, b2)?;
    let lateral_sign = sign_of(b1.cross(b2).dot(g.vector()));
    Ok((p1, p2, q12, lateral_sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vanishing_point_by_hand() {
        let s1 = ImageSegment::new([0.0, 0.0], [0.0, 1.0]).unwrap();
        let s2 = ImageSegment::new([1.0, 0.0], [2.0, 2.0]).unwrap();
        let vp = vanishing_point(&s1, &s2).unwrap();
        assert!((vp[0] - 0.0).abs() < 1e-12);
        assert!((vp[1] - -2.0).abs() < 1e-12);

        let s1 = ImageSegment::new([100.0, 0.0], [100.0, 400.0]).unwrap();
        let s2 = ImageSegment::new([500.0, 0.0], [520.0, 400.0]).unwrap();
        let vp = vanishing_point(&s1, &s2).unwrap();
        assert!((vp[0] - 100.0).abs() < 1e-9);
        assert!((vp[1] - -8000.0).abs() < 1e-6);
    }

    #[test]
    fn parallel_segments_have_no_vanishing_point() {
        let s1 = ImageSegment::new([0.0, 0.0], [0.0, 1.0]).unwrap();
        let s2 = ImageSegment::new([5.0, 0.0], [5.0, 1.0]).unwrap();
        assert_eq!(vanishing_point(&s1, &s2), Err(Error::ParallelLines));
    }

    #[test]
    fn gravity_from_vp_examples() {
        let k = CameraIntrinsics::new(600.0, 600.0, 320.0, 240.0).unwrap();
        let g = gravity_from_vp([320.0, 840.0], &k, default_down_hint()).unwrap();
        let expected = Vec3::new(0.0, 1.0, 1.0).normalized().unwrap();
        assert!((g.vector() - expected).norm() < 1e-12);

        let g = gravity_from_vp([320.0, 240.0], &k, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((g.vector() - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn ambiguous_hint_is_rejected() {
        let k = CameraIntrinsics::default();
        let r = gravity_from_vp([320.0, 240.0], &k, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(r, Err(Error::AmbiguousSign));
    }

    #[test]
    fn spreads_symmetric_apex() {
        let g = GravityDirection::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let (p1, p2, q12, lat) = spreads_vs_gravity(
            Vec3::new(0.0, -0.5, -0.5),
            Vec3::new(0.0, 0.5, -0.5),
            &g,
        )
        .unwrap();
        assert!((p1.value() - 0.5).abs() < 1e-15);
        assert!((p2.value() - 0.5).abs() < 1e-15);
        assert_eq!(q12.value(), 1.0);
        assert_eq!(q12.cosine_sign, 0);
        assert_eq!(lat, 0);
    }

    #[test]
    fn spreads_worked_case() {
        let g = GravityDirection::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let (p1, p2, q12, lat) = spreads_vs_gravity(
            Vec3::new(-0.5, -0.75, -0.5),
            Vec3::new(-0.5, 0.75, -0.5),
            &g,
        )
        .unwrap();
        assert!((p1.value() - 13.0 / 17.0).abs() < 1e-15);
        assert!((p2.value() - 13.0 / 17.0).abs() < 1e-15);
        assert!((q12.value() - 288.0 / 289.0).abs() < 1e-15);
        assert_eq!(q12.cosine_sign, -1);
        assert_eq!(lat, 1);
    }

    #[test]
    fn coincident_bearings_feed_degenerate_spread() {
        let g = GravityDirection::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let b = Vec3::new(0.1, 0.2, -0.5);
        let (_, _, q12, _) = spreads_vs_gravity(b, b, &g).unwrap();
        assert_eq!(q12.value(), 0.0);
        assert_eq!(q12.cosine_sign, 1);
    }

    fn segment() -> impl Strategy<Value = ImageSegment> {
        (
            -500.0f64..500.0,
            -500.0f64..500.0,
            -500.0f64..500.0,
            -500.0f64..500.0,
        )
            .prop_filter_map("distinct endpoints", |(ax, ay, bx, by)| {
                ImageSegment::new([ax, ay], [bx, by]).ok()
            })
    }

    proptest! {
        #[test]
        fn vanishing_point_is_symmetric_and_scale_free(s1 in segment(), s2 in segment(), t in 0.1f64..5.0) {
            if let Ok(vp) = vanishing_point(&s1, &s2) {
                let swapped = vanishing_point(&s2, &s1).unwrap();
                prop_assert!((vp[0] - swapped[0]).abs() < 1e-6 * vp[0].abs().max(1.0));
                prop_assert!((vp[1] - swapped[1]).abs() < 1e-6 * vp[1].abs().max(1.0));

                // Flip endpoint order and stretch one segment: same lines, same meet.
                let stretched = ImageSegment::new(
                    s1.b,
                    [s1.b[0] + t * (s1.a[0] - s1.b[0]), s1.b[1] + t * (s1.a[1] - s1.b[1])],
                ).unwrap();
                let vp2 = vanishing_point(&stretched, &s2).unwrap();
                prop_assert!((vp[0] - vp2[0]).abs() < 1e-5 * vp[0].abs().max(1.0));
                prop_assert!((vp[1] - vp2[1]).abs() < 1e-5 * vp[1].abs().max(1.0));
            }
        }
    }
}
