//! On-disk file formats. All documents are JSON with a top-level
//! `"version": 1` field and stable key order, so byte-level golden tests
//! work.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use resection::p3p::{P3PInput, P3PSolution};
use resection::scene::Observation;
use resection::solver::{HeightRange, PoseEstimate};
use resection::{Error, FieldModel, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Observation document: a field (built-in by name, or inline landmarks),
/// an optional height acceptance band, and one or more observations.
///
/// Observation rules: `landmarks` lists the two ids in order — the first id
/// pairs with the first bearing or pixel; exactly one of `bearings` or
/// `pixels` (with `intrinsics`) is present; gravity comes either as a
/// camera-frame `gravity` vector or as two `vertical_segments` plus
/// `intrinsics`. Bearings are camera-frame vectors — angles never appear in
/// any file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationFile {
    pub version: u32,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_range: Option<HeightRangeSpec>,
    pub observations: Vec<Observation>,
}

/// Either the name of a built-in field or an inline landmark map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Builtin(String),
    Inline { landmarks: BTreeMap<String, [f64; 2]> },
}

impl FieldSpec {
    pub fn resolve(&self) -> Result<FieldModel> {
        match self {
            FieldSpec::Builtin(name) => resection::scene::builtin_field(name)
                .ok_or_else(|| Error::UnknownLandmark(format!("field `{name}`"))),
            FieldSpec::Inline { landmarks } => Ok(FieldModel::new(landmarks.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightRangeSpec {
    pub min: f64,
    pub max: f64,
}

impl HeightRangeSpec {
    pub fn to_range(self) -> Result<HeightRange> {
        HeightRange::new(self.min, self.max)
    }
}

/// Output of `solve`: one row per observation, successful or marked.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOutput {
    pub version: u32,
    pub results: Vec<SolveRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveRow {
    pub index: usize,
    pub landmarks: [String; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Input document for the three-point solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P3PFile {
    pub version: u32,
    pub input: P3PInput,
}

#[derive(Debug, Clone, Serialize)]
pub struct P3POutput {
    pub version: u32,
    pub solutions: Vec<P3PSolution>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GravityOutput {
    pub version: u32,
    pub vanishing_point: [f64; 2],
    pub gravity: [f64; 3],
}
