//! Embedded reference data from the 2004/2005 SLAM-challenge recording
//! sessions: taped marker positions, OptiTrack reference poses, and the
//! pose predictions made with the IMU and visual gravity cues.
//!
//! These records are data, not computation; they back the `eval`
//! subcommand and the error-statistics regression tests.

use serde::{Deserialize, Serialize};

/// Which challenge layout a fixture belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Challenge {
    Slam2004,
    Slam2005,
}

/// One marked position with whatever measurements exist for it. Not every
/// marker has predictions: some observations lacked the center circle, and
/// a visual prediction needs goal posts in the field of view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeFixture {
    pub id: String,
    pub challenge: Challenge,
    /// Taped marker position on the field, meters.
    pub marker: [f64; 2],
    /// OptiTrack reference pose (x, y, h), meters.
    pub optitrack: Option<[f64; 3]>,
    /// Prediction with the IMU-derived gravity vector.
    pub imu_prediction: Option<[f64; 3]>,
    /// Prediction with the gravity vector from the goal-post vanishing point.
    pub visual_prediction: Option<[f64; 3]>,
}

/// Error statistics published alongside the visual-gravity predictions
/// (mean absolute error and standard deviation per component, meters).
pub const PUBLISHED_VISUAL_MAE: [f64; 3] = [0.044, 0.030, 0.076];
pub const PUBLISHED_VISUAL_STD: [f64; 3] = [0.037, 0.017, 0.069];

/// Height acceptance band used when flagging implausible predictions.
pub const PUBLISHED_HEIGHT_RANGE: (f64, f64) = (0.440, 0.550);

fn fixture(
    id: &str,
    challenge: Challenge,
    marker: [f64; 2],
    optitrack: Option<[f64; 3]>,
    imu: Option<[f64; 3]>,
    visual: Option<[f64; 3]>,
) -> ChallengeFixture {
    ChallengeFixture {
        id: id.to_string(),
        challenge,
        marker,
        optitrack,
        imu_prediction: imu,
        visual_prediction: visual,
    }
}

/// All ten challenge fixtures, in recording order.
pub fn challenge_fixtures() -> Vec<ChallengeFixture> {
    use Challenge::*;
    vec![
        fixture(
            "red1",
            Slam2004,
            [1.600, 1.000],
            Some([1.626, 1.004, 0.449]),
            Some([1.637, 0.939, 0.483]),
            Some([1.545, 1.023, 0.369]),
        ),
        fixture(
            "red2",
            Slam2004,
            [1.800, -0.300],
            Some([1.849, -0.330, 0.452]),
            Some([1.576, -0.721, 0.364]),
            Some([1.784, -0.306, 0.468]),
        ),
        fixture("red3", Slam2004, [0.500, -1.000], None, None, None),
        fixture(
            "red4",
            Slam2004,
            [-2.100, 0.000],
            Some([-2.115, 0.014, 0.452]),
            Some([-2.083, -0.125, 0.448]),
            Some([-2.100, 0.056, 0.390]),
        ),
        fixture("red5", Slam2004, [-1.000, 0.500], None, None, None),
        fixture(
            "black1",
            Slam2005,
            [1.300, 1.200],
            Some([1.296, 1.217, 0.460]),
            Some([1.296, 1.157, 0.538]),
            None,
        ),
        fixture(
            "black2",
            Slam2005,
            [2.700, 0.000],
            Some([2.791, 0.003, 0.472]),
            Some([2.596, 0.549, 0.606]),
            Some([2.706, 0.027, 0.597]),
        ),
        fixture(
            "black3",
            Slam2005,
            [2.200, -1.500],
            Some([2.207, -1.505, 0.474]),
            Some([2.560, -1.199, 0.577]),
            Some([2.230, -1.449, 0.502]),
        ),
        fixture(
            "black4",
            Slam2005,
            [-1.600, -1.200],
            Some([-1.513, -1.298, 0.454]),
            Some([-1.654, -1.298, 0.499]),
            None,
        ),
        fixture(
            "black5",
            Slam2005,
            [-2.100, 0.900],
            Some([-2.070, 0.907, 0.425]),
            Some([-1.439, 1.302, 0.301]),
            Some([-2.058, 0.919, 0.449]),
        ),
    ]
}

/// The fixture rows that carry both a visual prediction and an OptiTrack
/// reference, paired `(predictions, references)` in fixture order.
pub fn visual_rows() -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    paired_rows(|f| f.visual_prediction)
}

/// Same pairing for the IMU predictions.
pub fn imu_rows() -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    paired_rows(|f| f.imu_prediction)
}

fn paired_rows(
    prediction: impl Fn(&ChallengeFixture) -> Option<[f64; 3]>,
) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let mut preds = Vec::new();
    let mut refs = Vec::new();
    for f in challenge_fixtures() {
        if let (Some(p), Some(r)) = (prediction(&f), f.optitrack) {
            preds.push(p);
            refs.push(r);
        }
    }
    (preds, refs)
}
