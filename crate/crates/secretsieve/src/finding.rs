//! Shared finding types carried across detectors and into reports.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    ThreeLayer,
    SigFlow,
    Intrinsic,
    Context,
    StringGroup,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 5] = [
        DetectorKind::ThreeLayer,
        DetectorKind::SigFlow,
        DetectorKind::Intrinsic,
        DetectorKind::Context,
        DetectorKind::StringGroup,
    ];

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "three_layer" => Some(DetectorKind::ThreeLayer),
            "sig_flow" => Some(DetectorKind::SigFlow),
            "intrinsic" => Some(DetectorKind::Intrinsic),
            "context" => Some(DetectorKind::Context),
            "string_group" => Some(DetectorKind::StringGroup),
            _ => None,
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DetectorKind::ThreeLayer => "three_layer",
            DetectorKind::SigFlow => "sig_flow",
            DetectorKind::Intrinsic => "intrinsic",
            DetectorKind::Context => "context",
            DetectorKind::StringGroup => "string_group",
        };
        f.write_str(name)
    }
}

/// Where a value was seen or reconstructed.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Location {
    pub class: String,
    pub method: Option<String>,
    pub statement_index: Option<usize>,
}

/// One step of a backward-slice trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub class: String,
    pub method: String,
    pub statement_index: usize,
    pub transfer: String,
}

/// A detected candidate secret, merged per app by `(value, provider)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecretFinding {
    pub app_id: String,
    /// The candidate value, possibly reconstructed by slicing.
    pub value: String,
    pub provider: String,
    pub detectors: BTreeSet<DetectorKind>,
    pub locations: Vec<Location>,
    pub confidence: BTreeMap<DetectorKind, f64>,
    /// How many times the same (value, provider) was seen in this app.
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_trace: Option<Vec<TraceStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_verdict: Option<crate::three_layer::FilterVerdict>,
    /// Set on structural signature matches whose owner differed from the
    /// catalog entry.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fuzzy_match: bool,
}

impl SecretFinding {
    pub fn new(app_id: &str, value: &str, provider: &str, detector: DetectorKind) -> Self {
        SecretFinding {
            app_id: app_id.to_string(),
            value: value.to_string(),
            provider: provider.to_string(),
            detectors: BTreeSet::from([detector]),
            locations: Vec::new(),
            confidence: BTreeMap::new(),
            multiplicity: 1,
            slice_trace: None,
            filter_verdict: None,
            fuzzy_match: false,
        }
    }
}

/// Masks a secret value: first four characters plus the total length,
/// e.g. `AIza…(39)`.
pub fn mask_value(value: &str) -> String {
    let total = value.chars().count();
    let prefix: String = value.chars().take(4).collect();
    format!("{prefix}…({total})")
}
