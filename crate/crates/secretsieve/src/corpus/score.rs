//! Scoring detector output against the ground-truth manifest: per-detector
//! and combined precision/recall/F1, plus the unique-value overlap matrix
//! behind the comparison report.

use super::gen::GroundTruthManifest;
use crate::finding::{DetectorKind, SecretFinding};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DetectorMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl DetectorMetrics {
    fn from_sets(found: &BTreeSet<(String, String)>, truth: &BTreeSet<(String, String)>) -> Self {
        let tp = found.intersection(truth).count();
        let fp = found.len() - tp;
        let fn_ = truth.len() - tp;
        let precision = if found.is_empty() {
            0.0
        } else {
            tp as f64 / found.len() as f64
        };
        let recall = if truth.is_empty() {
            0.0
        } else {
            tp as f64 / truth.len() as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        DetectorMetrics {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_detector: BTreeMap<DetectorKind, DetectorMetrics>,
    /// detector -> provider -> metrics restricted to that provider.
    pub per_detector_provider: BTreeMap<DetectorKind, BTreeMap<String, DetectorMetrics>>,
    pub combined: DetectorMetrics,
    /// Detector-set key (sorted, `+`-joined) -> count of unique
    /// (value, provider) pairs found by exactly that set.
    pub overlap: BTreeMap<String, usize>,
}

/// Matches findings to the manifest by exact value plus provider equality.
pub fn score(findings: &[SecretFinding], manifest: &GroundTruthManifest) -> ScoreReport {
    let truth: BTreeSet<(String, String)> = manifest
        .entries
        .iter()
        .map(|e| (e.value.clone(), e.provider.clone()))
        .collect();

    // Unique (value, provider) per detector.
    let mut by_detector: BTreeMap<DetectorKind, BTreeSet<(String, String)>> = BTreeMap::new();
    let mut detectors_of: BTreeMap<(String, String), BTreeSet<DetectorKind>> = BTreeMap::new();
    for f in findings {
        let key = (f.value.clone(), f.provider.clone());
        for d in &f.detectors {
            by_detector.entry(*d).or_default().insert(key.clone());
            detectors_of.entry(key.clone()).or_default().insert(*d);
        }
    }

    let mut per_detector = BTreeMap::new();
    let mut per_detector_provider: BTreeMap<DetectorKind, BTreeMap<String, DetectorMetrics>> =
        BTreeMap::new();
    let providers: BTreeSet<String> = truth
        .iter()
        .map(|(_, p)| p.clone())
        .chain(detectors_of.keys().map(|(_, p)| p.clone()))
        .collect();
    for (detector, found) in &by_detector {
        per_detector.insert(*detector, DetectorMetrics::from_sets(found, &truth));
        let per_provider = per_detector_provider.entry(*detector).or_default();
        for provider in &providers {
            let found_p: BTreeSet<_> = found.iter().filter(|(_, p)| p == provider).cloned().collect();
            let truth_p: BTreeSet<_> = truth.iter().filter(|(_, p)| p == provider).cloned().collect();
            if found_p.is_empty() && truth_p.is_empty() {
                continue;
            }
            per_provider.insert(provider.clone(), DetectorMetrics::from_sets(&found_p, &truth_p));
        }
    }

    let all_found: BTreeSet<(String, String)> = detectors_of.keys().cloned().collect();
    let combined = DetectorMetrics::from_sets(&all_found, &truth);

    let mut overlap: BTreeMap<String, usize> = BTreeMap::new();
    for dets in detectors_of.values() {
        let mut names: Vec<String> = dets.iter().map(|d| d.to_string()).collect();
        names.sort();
        *overlap.entry(names.join("+")).or_insert(0) += 1;
    }

    ScoreReport {
        per_detector,
        per_detector_provider,
        combined,
        overlap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::gen::{GroundTruthManifest, ManifestEntry, Placement};

    fn manifest(values: &[(&str, &str)]) -> GroundTruthManifest {
        GroundTruthManifest {
            seed: 0,
            entries: values
                .iter()
                .map(|(v, p)| ManifestEntry {
                    app_id: "app_0000".into(),
                    value: v.to_string(),
                    provider: p.to_string(),
                    placement: Placement::LiteralArg,
                    class: "c".into(),
                    method: "m0()".into(),
                    index: 0,
                })
                .collect(),
        }
    }

    fn finding(value: &str, provider: &str, detector: DetectorKind) -> SecretFinding {
        SecretFinding::new("app_0000", value, provider, detector)
    }

    #[test]
    fn perfect_detector_scores_one() {
        let m = manifest(&[("K1", "google"), ("K2", "google")]);
        let findings = vec![
            finding("K1", "google", DetectorKind::ThreeLayer),
            finding("K2", "google", DetectorKind::ThreeLayer),
        ];
        let report = score(&findings, &m);
        let metrics = report.per_detector[&DetectorKind::ThreeLayer];
        assert_eq!(metrics.precision, 1.0);
        assert_eq!(metrics.recall, 1.0);
        assert_eq!(metrics.f1, 1.0);
    }

    #[test]
    fn complementary_detectors_have_empty_both_cell() {
        let m = manifest(&[("K1", "google"), ("K2", "google")]);
        let findings = vec![
            finding("K1", "google", DetectorKind::ThreeLayer),
            finding("K2", "google", DetectorKind::SigFlow),
        ];
        let report = score(&findings, &m);
        assert_eq!(report.overlap.get("three_layer"), Some(&1));
        assert_eq!(report.overlap.get("sig_flow"), Some(&1));
        assert_eq!(report.overlap.get("sig_flow+three_layer"), None);
        assert_eq!(report.combined.recall, 1.0);
    }

    #[test]
    fn overlap_cells_sum_to_unique_pairs() {
        let m = manifest(&[("K1", "google")]);
        let mut both = finding("K1", "google", DetectorKind::ThreeLayer);
        both.detectors.insert(DetectorKind::SigFlow);
        let findings = vec![
            both,
            finding("X9", "twitter_client_id", DetectorKind::ThreeLayer),
        ];
        let report = score(&findings, &m);
        let total: usize = report.overlap.values().sum();
        assert_eq!(total, 2);
        assert_eq!(report.overlap.get("sig_flow+three_layer"), Some(&1));
    }

    #[test]
    fn per_provider_precision_splits_loose_and_precise() {
        let m = manifest(&[("K1", "google")]);
        let findings = vec![
            finding("K1", "google", DetectorKind::ThreeLayer),
            finding("ZzYyXxWwVv12345678", "twitter_client_id", DetectorKind::ThreeLayer),
        ];
        let report = score(&findings, &m);
        let per_provider = &report.per_detector_provider[&DetectorKind::ThreeLayer];
        assert_eq!(per_provider["google"].precision, 1.0);
        assert_eq!(per_provider["twitter_client_id"].precision, 0.0);
    }
}
