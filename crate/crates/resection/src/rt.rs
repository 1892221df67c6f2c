//! Rational-trigonometry primitives.
//!
//! Distances and angles are replaced by their squared counterparts: the
//! *quadrance* (squared distance, m²) and the *spread* (squared sine of the
//! angle between two lines, dimensionless in [0, 1]). Working in these
//! measures keeps every operation inside +, −, ×, ÷ and the occasional
//! square root; nothing here calls a transcendental function except the
//! explicit angle converters [`to_angle`] and [`to_spread`], which exist for
//! I/O only.
//!
//! A spread carries no sign: an angle and its supplement have the same
//! spread. Where downstream code needs the acute/obtuse distinction,
//! [`SignedSpread`] keeps the sign of the underlying cosine alongside.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative headroom for the spread-law consistency check.
const SPREAD_LAW_TOL: f64 = 1e-9;

/// A 3-vector in meters (positions) or unitless (directions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Squared length; the quadrance from the origin.
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self * (1.0 / n))
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Squared distance between two points, in m². Always ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quadrance(f64);

impl Quadrance {
    /// Wraps a raw squared distance, rejecting negative or non-finite input.
    pub fn new(value: f64) -> Result<Quadrance> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeQuadrance(value));
        }
        Ok(Quadrance(value))
    }

    pub fn from_distance(d: f64) -> Quadrance {
        Quadrance(d * d)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The distance this quadrance squares, in meters.
    pub fn distance(self) -> f64 {
        self.0.sqrt()
    }

    pub const ZERO: Quadrance = Quadrance(0.0);

    pub(crate) fn new_unchecked(value: f64) -> Quadrance {
        debug_assert!(value >= 0.0, "quadrance must be non-negative: {value}");
        Quadrance(value)
    }
}

/// Squared sine of the angle between two lines; dimensionless in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spread(f64);

impl Spread {
    pub fn new(value: f64) -> Result<Spread> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::SpreadOutOfRange(value));
        }
        Ok(Spread(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub const ZERO: Spread = Spread(0.0);
    pub const FULL: Spread = Spread(1.0);

    pub(crate) fn clamped(value: f64) -> Spread {
        Spread(value.clamp(0.0, 1.0))
    }
}

/// A spread that remembers the sign of the cosine it was computed from,
/// distinguishing acute from obtuse where plain spreads cannot.
///
/// Invariant: `cosine_sign == 0` exactly when the spread is 1 (perpendicular).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedSpread {
    pub spread: Spread,
    pub cosine_sign: i8,
}

impl SignedSpread {
    pub fn new(spread: Spread, cosine_sign: i8) -> Result<SignedSpread> {
        if !(-1..=1).contains(&(cosine_sign as i32)) {
            return Err(Error::SignSpreadMismatch(spread.value()));
        }
        if (cosine_sign == 0) != (spread.value() == 1.0) {
            return Err(Error::SignSpreadMismatch(spread.value()));
        }
        Ok(SignedSpread {
            spread,
            cosine_sign,
        })
    }

    pub fn value(self) -> f64 {
        self.spread.value()
    }

    /// Signed cosine recovered from the spread: `sign · √(1 − s)`.
    pub fn cosine(self) -> f64 {
        self.cosine_sign as f64 * (1.0 - self.spread.value()).max(0.0).sqrt()
    }
}

/// Sign of a real number as −1, 0 or +1. `f64::signum` maps 0.0 to 1.0,
/// which is wrong for orientation tests.
pub fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Quadrance between two points: Σ(aᵢ−bᵢ)².
pub fn quadrance(a: Vec3, b: Vec3) -> Quadrance {
    let d = a - b;
    Quadrance::new_unchecked(d.norm_squared())
}

/// Spread between two directions, with the sign of their cosine.
///
/// `s = 1 − (v1·v2)² / (|v1|²·|v2|²)`, multiplications and divisions only.
pub fn spread_between(v1: Vec3, v2: Vec3) -> Result<SignedSpread> {
    let q1 = v1.norm_squared();
    let q2 = v2.norm_squared();
    if q1 == 0.0 || q2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot = v1.dot(v2);
    let spread = Spread::clamped(1.0 - (dot * dot) / (q1 * q2));
    // Rounding can drive the ratio to zero while dot stays (denormal) nonzero;
    // keep the sign consistent with the stored spread.
    let cosine_sign = if spread.value() == 1.0 { 0 } else { sign_of(dot) };
    Ok(SignedSpread {
        spread,
        cosine_sign,
    })
}

/// Both solutions of the cross law for the quadrance opposite a known spread:
/// `(Q1 + Q2 − Q3)² = 4·Q1·Q2·(1 − s3)` solved for Q3.
///
/// Returns the two roots `Q1 + Q2 ∓ 2√(Q1·Q2·(1−s3))`, smaller first. The
/// roots coincide when the spread is 1.
pub fn cross_law_q3(q1: Quadrance, q2: Quadrance, s3: Spread) -> (Quadrance, Quadrance) {
    let root = (q1.value() * q2.value() * (1.0 - s3.value())).sqrt();
    let sum = q1.value() + q2.value();
    let low = (sum - 2.0 * root).max(0.0);
    let high = sum + 2.0 * root;
    (
        Quadrance::new_unchecked(low),
        Quadrance::new_unchecked(high),
    )
}

/// Spread law: in a triangle the ratio spread/quadrance is the same at every
/// vertex, so the spread opposite `q_target` is `s_known · q_target / q_known`.
///
/// Errors if the result exceeds 1 beyond numerical headroom — the claimed
/// triangle cannot exist.
pub fn spread_law_missing(s_known: Spread, q_known: Quadrance, q_target: Quadrance) -> Result<Spread> {
    if q_known.value() == 0.0 {
        return Err(Error::Degenerate("spread law with zero known quadrance"));
    }
    let s = s_known.value() * q_target.value() / q_known.value();
    if s > 1.0 + SPREAD_LAW_TOL {
        return Err(Error::InconsistentTriangle(s));
    }
    Ok(Spread::clamped(s))
}

/// Distance in meters from a quadrance. See [`Quadrance::distance`].
pub fn to_distance(q: Quadrance) -> f64 {
    q.distance()
}

/// Quadrance from a distance in meters.
pub fn to_quadrance(d: f64) -> Quadrance {
    Quadrance::from_distance(d)
}

/// Angle in radians from a signed spread, in [0, π]. The cosine sign selects
/// between the acute branch [0, π/2] and the obtuse branch (π/2, π].
pub fn to_angle(s: SignedSpread) -> f64 {
    let half = s.spread.value().sqrt().asin();
    match s.cosine_sign {
        0 => std::f64::consts::FRAC_PI_2,
        1 => half,
        _ => std::f64::consts::PI - half,
    }
}

/// Spread from an angle in radians: sin²(angle).
pub fn to_spread(angle: f64) -> Spread {
    let s = angle.sin();
    Spread::clamped(s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadrance_of_points() {
        assert_eq!(
            quadrance(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.5, 0.0)).value(),
            2.25
        );
        assert_eq!(
            quadrance(Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 4.0, 0.0)).value(),
            25.0
        );
        assert_eq!(
            quadrance(Vec3::new(1.0, 1.0, 1.0), Vec3::new(1.0, 1.0, 1.0)).value(),
            0.0
        );
    }

    #[test]
    fn spread_of_directions() {
        let s = spread_between(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(s.value(), 1.0);
        assert_eq!(s.cosine_sign, 0);

        let s = spread_between(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert!((s.value() - 0.5).abs() < 1e-15);
        assert_eq!(s.cosine_sign, 1);

        let s = spread_between(Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 1.0, 0.0)).unwrap();
        assert!((s.value() - 0.5).abs() < 1e-15);
        assert_eq!(s.cosine_sign, -1);
    }

    #[test]
    fn spread_rejects_zero_vector() {
        assert_eq!(
            spread_between(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn cross_law_examples() {
        let (a, b) = cross_law_q3(
            Quadrance::new(9.0).unwrap(),
            Quadrance::new(16.0).unwrap(),
            Spread::FULL,
        );
        assert_eq!((a.value(), b.value()), (25.0, 25.0));

        let (a, b) = cross_law_q3(
            Quadrance::new(1.0).unwrap(),
            Quadrance::new(1.0).unwrap(),
            Spread::ZERO,
        );
        assert_eq!((a.value(), b.value()), (0.0, 4.0));

        let (a, b) = cross_law_q3(
            Quadrance::new(1.0).unwrap(),
            Quadrance::new(1.0).unwrap(),
            Spread::FULL,
        );
        assert_eq!((a.value(), b.value()), (2.0, 2.0));
    }

    #[test]
    fn cross_law_residual_over_random_inputs() {
        // Both roots have to satisfy the defining identity to 1e-12 relative.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let q1 = Quadrance::new(rng.random_range(1e-3..100.0)).unwrap();
            let q2 = Quadrance::new(rng.random_range(1e-3..100.0)).unwrap();
            let s3 = Spread::new(rng.random_range(0.0..=1.0)).unwrap();
            let scale = 4.0 * q1.value() * q2.value();
            for q3 in [cross_law_q3(q1, q2, s3).0, cross_law_q3(q1, q2, s3).1] {
                let lhs = (q1.value() + q2.value() - q3.value()).powi(2);
                let rhs = 4.0 * q1.value() * q2.value() * (1.0 - s3.value());
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * scale.max(1.0),
                    "residual too large: q1={q1:?} q2={q2:?} s3={s3:?}"
                );
            }
        }
    }

    #[test]
    fn spread_law_examples() {
        let s = spread_law_missing(
            Spread::FULL,
            Quadrance::new(25.0).unwrap(),
            Quadrance::new(9.0).unwrap(),
        )
        .unwrap();
        assert_eq!(s.value(), 9.0 / 25.0);

        let s = spread_law_missing(
            Spread::FULL,
            Quadrance::new(25.0).unwrap(),
            Quadrance::new(16.0).unwrap(),
        )
        .unwrap();
        assert_eq!(s.value(), 16.0 / 25.0);

        let s = spread_law_missing(
            Spread::new(0.5).unwrap(),
            Quadrance::new(2.0).unwrap(),
            Quadrance::new(2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(s.value(), 0.5);
    }

    #[test]
    fn spread_law_rejects_inconsistent_triangle() {
        let r = spread_law_missing(
            Spread::FULL,
            Quadrance::new(1.0).unwrap(),
            Quadrance::new(2.0).unwrap(),
        );
        assert!(matches!(r, Err(Error::InconsistentTriangle(_))));
    }

    #[test]
    fn conversions() {
        assert_eq!(to_distance(Quadrance::new(2.25).unwrap()), 1.5);
        assert!(Quadrance::new(-1.0).is_err());
        assert_eq!(to_spread(std::f64::consts::FRAC_PI_2).value(), 1.0);
        let s = SignedSpread::new(Spread::new(0.5).unwrap(), -1).unwrap();
        assert!((to_angle(s) - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn signed_spread_invariant() {
        assert!(SignedSpread::new(Spread::FULL, 0).is_ok());
        assert!(SignedSpread::new(Spread::FULL, 1).is_err());
        assert!(SignedSpread::new(Spread::new(0.5).unwrap(), 0).is_err());
    }

    fn nonzero_vec3() -> impl Strategy<Value = Vec3> {
        (
            -100.0f64..100.0,
            -100.0f64..100.0,
            -100.0f64..100.0,
        )
            .prop_map(|(x, y, z)| Vec3::new(x, y, z))
            .prop_filter("nonzero", |v| v.norm_squared() > 1e-6)
    }

    proptest! {
        #[test]
        fn spread_is_scale_invariant(v1 in nonzero_vec3(), v2 in nonzero_vec3(), k in prop::sample::select(vec![-3.0f64, -1.0, 0.5, 2.0, 10.0])) {
            let s = spread_between(v1, v2).unwrap();
            let sk = spread_between(v1 * k, v2).unwrap();
            prop_assert!((s.value() - sk.value()).abs() < 1e-12);
        }

        #[test]
        fn adjacent_angles_share_spread_with_flipped_sign(v1 in nonzero_vec3(), v2 in nonzero_vec3()) {
            let s = spread_between(v1, v2).unwrap();
            let flipped = spread_between(-v1, v2).unwrap();
            prop_assert!((s.value() - flipped.value()).abs() < 1e-12);
            prop_assert_eq!(s.cosine_sign, -flipped.cosine_sign);
        }

        #[test]
        fn distance_round_trip(q in 0.0f64..1e6) {
            let quad = Quadrance::new(q).unwrap();
            let back = to_quadrance(to_distance(quad));
            prop_assert!((back.value() - q).abs() <= 1e-12 * q.max(1.0));
        }

        #[test]
        fn angle_round_trip(angle in 0.001f64..std::f64::consts::PI) {
            let s = to_spread(angle);
            let sign = sign_of(angle.cos());
            // Rebuild the signed spread the way spread_between would.
            let signed = SignedSpread { spread: s, cosine_sign: if s.value() == 1.0 { 0 } else { sign } };
            prop_assert!((to_angle(signed) - angle).abs() < 1e-7);
        }
    }
}
