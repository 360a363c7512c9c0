//! Synthetic corpus generation, obfuscation, scoring, and dataset builders.

pub mod datasets;
pub mod gen;
mod obfuscate;
mod score;

pub use gen::{
    gen_corpus, manifest_from_jsonl, manifest_to_jsonl, write_corpus, GenError, GenSpec,
    GeneratedCorpus, GroundTruthManifest, ManifestEntry, NoiseProfile, Placement, SeedSpec,
};
pub use datasets::{labeled_groups, labeled_strings, labeled_windows, rendered_window};
pub use obfuscate::{obfuscate, RenameMap};
pub use score::{score, DetectorMetrics, ScoreReport};
