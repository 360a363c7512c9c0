//! Learned detectors: intrinsic-string and context-window classifiers, the
//! string-group classifier, and the cosine-similarity separability study.
//!
//! Deep sequence models are deliberately out of scope: linear models over
//! engineered features keep the training recipes small, auditable, and
//! deterministic for a given seed.

mod features;
mod models;
mod stats;

pub use features::{
    char_ngrams, char_vector, cosine_similarity, count_vector, group_tokens, idf, idf_table, tf,
    tfidf_vector, tokenize, FeatureError, FeatureVector, Scheme, Variant, Vocabulary,
};
pub use models::{
    context_classify, dataset_to_jsonl, fit, intrinsic_classify, load_dataset_jsonl,
    predict_group, Label, LabeledGroupDataset, LearnedError, Metrics, ModelKind, ModelMetadata,
    ModelParams, TrainedModel,
};
pub use stats::{
    beta_inc, erfc, f_cdf, f_test, normal_sf, separability_study, z_test, StudyReport,
    P_VALUE_FLOOR,
};
