//! Binary classifiers over string-group features, trained from first
//! principles with fixed recipes so results are bit-reproducible:
//!
//! - logistic regression: full-batch gradient descent, lr 0.1, 500 epochs,
//!   L2 1e-4, unregularized bias, L2-normalized rows;
//! - multinomial naive Bayes with Laplace smoothing (alpha = 1) on raw
//!   counts;
//! - linear SVC: full-batch Pegasos subgradient on the hinge loss,
//!   lambda 1e-3, 1000 epochs, bias as an augmented constant feature,
//!   L2-normalized rows.

use crate::learned::features::{
    char_ngrams, char_vector, count_vector, group_tokens, idf_table, tfidf_vector, FeatureVector,
    Scheme, Variant, Vocabulary,
};
use crate::extract::StringGroup;
use crate::three_layer::Dictionary;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Secret,
    NoSecret,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGroupDataset {
    pub entries: Vec<(StringGroup, Label)>,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    NaiveBayes,
    LinearSvc,
}

impl ModelKind {
    pub fn parse(name: &str) -> Option<ModelKind> {
        match name {
            "logistic_regression" => Some(ModelKind::LogisticRegression),
            "naive_bayes" => Some(ModelKind::NaiveBayes),
            "linear_svc" => Some(ModelKind::LinearSvc),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModelParams {
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    NaiveBayes {
        class_log_prior: [f64; 2],
        /// Indexed `[feature][class]`, class 0 = no_secret, 1 = secret.
        feature_log_prob: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    pub split_ratio: f64,
    pub hyperparameters: BTreeMap<String, f64>,
    pub trained_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub scheme: Scheme,
    pub variant: Variant,
    pub vocabulary: Vocabulary,
    /// Per-vocabulary-index IDF, present for the tfidf scheme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idf: Option<Vec<f64>>,
    pub params: ModelParams,
    pub metadata: ModelMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum LearnedError {
    #[error("dataset holds a single class only")]
    DegenerateDataset,
    #[error("need at least {needed} entries per class, got {got}")]
    TooFewEntries { needed: usize, got: usize },
    #[error("model scheme {model:?} cannot score this input")]
    SchemeMismatch { model: Scheme },
    #[error("empty string")]
    EmptyString,
    #[error("empty context window")]
    EmptyWindow,
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl TrainedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, LearnedError> {
        Ok(serde_json::from_str(text)?)
    }

    fn featurize(&self, strings: &[String], dictionary: &Dictionary) -> FeatureVector {
        featurize(
            self.scheme,
            self.variant,
            &self.vocabulary,
            self.idf.as_deref(),
            strings,
            dictionary,
        )
    }

    /// Probability that the input is a secret.
    fn score(&self, features: &FeatureVector) -> f64 {
        match &self.params {
            ModelParams::Linear { weights, bias } => {
                let row = normalize(sparse_row(features));
                sigmoid(dot(weights, &row) + bias)
            }
            ModelParams::NaiveBayes {
                class_log_prior,
                feature_log_prob,
            } => {
                let mut s = [class_log_prior[0], class_log_prior[1]];
                for (&i, &v) in &features.dims {
                    if let Some(flp) = feature_log_prob.get(i as usize) {
                        s[0] += v * flp[0];
                        s[1] += v * flp[1];
                    }
                }
                // Softmax over the two log scores.
                1.0 / (1.0 + (s[0] - s[1]).exp())
            }
        }
    }
}

fn featurize(
    scheme: Scheme,
    variant: Variant,
    vocab: &Vocabulary,
    idf: Option<&[f64]>,
    strings: &[String],
    dictionary: &Dictionary,
) -> FeatureVector {
    match scheme {
        Scheme::CharHistogram => char_vector(strings, variant, dictionary).unwrap_or(FeatureVector {
            scheme,
            variant,
            dims: BTreeMap::new(),
        }),
        Scheme::CountFrequency => {
            let tokens = group_tokens(strings, variant, dictionary);
            count_vector(&tokens, vocab, variant)
        }
        Scheme::Tfidf => {
            let tokens = group_tokens(strings, variant, dictionary);
            tfidf_vector(&tokens, vocab, idf.unwrap_or(&[]), variant)
        }
        Scheme::CharNgram => {
            let grams = char_ngrams(strings, variant, dictionary);
            let mut v = count_vector(&grams, vocab, variant);
            v.scheme = Scheme::CharNgram;
            v
        }
    }
}

fn token_lists(
    scheme: Scheme,
    variant: Variant,
    entries: &[(StringGroup, Label)],
    dictionary: &Dictionary,
) -> Vec<Vec<String>> {
    entries
        .iter()
        .map(|(g, _)| match scheme {
            Scheme::CharNgram => char_ngrams(&g.strings, variant, dictionary),
            _ => group_tokens(&g.strings, variant, dictionary),
        })
        .collect()
}

fn sparse_row(v: &FeatureVector) -> Vec<(u32, f64)> {
    v.dims.iter().map(|(&i, &w)| (i, w)).collect()
}

fn normalize(mut row: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in &mut row {
            *v /= norm;
        }
    }
    row
}

fn dot(weights: &[f64], row: &[(u32, f64)]) -> f64 {
    row.iter()
        .map(|&(i, v)| weights.get(i as usize).copied().unwrap_or(0.0) * v)
        .sum()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Trains a model on a deterministic 80/20 split and reports held-out
/// metrics. The vocabulary (and IDF for the tfidf scheme) is frozen from
/// the training portion; unknown terms weigh zero at predict time.
pub fn fit(
    dataset: &LabeledGroupDataset,
    kind: ModelKind,
    scheme: Scheme,
    split_seed: u64,
    dictionary: &Dictionary,
) -> Result<(TrainedModel, Metrics), LearnedError> {
    let n_secret = dataset
        .entries
        .iter()
        .filter(|(_, l)| *l == Label::Secret)
        .count();
    let n_nosecret = dataset.entries.len() - n_secret;
    if n_secret == 0 || n_nosecret == 0 {
        return Err(LearnedError::DegenerateDataset);
    }
    let smallest = n_secret.min(n_nosecret);
    if smallest < 10 {
        return Err(LearnedError::TooFewEntries {
            needed: 10,
            got: smallest,
        });
    }

    let mut indices: Vec<usize> = (0..dataset.entries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    indices.shuffle(&mut rng);
    let n_train = (dataset.entries.len() * 4) / 5;
    let (train_idx, test_idx) = indices.split_at(n_train);

    let lists = token_lists(scheme, dataset.variant, &dataset.entries, dictionary);
    let train_lists: Vec<Vec<String>> = train_idx.iter().map(|&i| lists[i].clone()).collect();
    let vocabulary = match scheme {
        Scheme::CharHistogram => Vocabulary::default(),
        _ => Vocabulary::build(train_lists.iter()),
    };
    let idf = (scheme == Scheme::Tfidf).then(|| idf_table(&train_lists, &vocabulary));

    let dims = match scheme {
        Scheme::CharHistogram => 256,
        _ => vocabulary.len(),
    };

    let featurize_entry = |i: usize| -> (Vec<(u32, f64)>, bool) {
        let (group, label) = &dataset.entries[i];
        let v = featurize(
            scheme,
            dataset.variant,
            &vocabulary,
            idf.as_deref(),
            &group.strings,
            dictionary,
        );
        (sparse_row(&v), *label == Label::Secret)
    };

    let train: Vec<(Vec<(u32, f64)>, bool)> =
        train_idx.iter().map(|&i| featurize_entry(i)).collect();

    let (params, hyper) = match kind {
        ModelKind::LogisticRegression => train_logistic(&train, dims),
        ModelKind::NaiveBayes => train_naive_bayes(&train, dims),
        ModelKind::LinearSvc => train_svc(&train, dims),
    };

    let model = TrainedModel {
        kind,
        scheme,
        variant: dataset.variant,
        vocabulary,
        idf,
        params,
        metadata: ModelMetadata {
            seed: split_seed,
            split_ratio: 0.8,
            hyperparameters: hyper,
            trained_entries: n_train,
        },
    };

    // Held-out metrics, positive class = secret.
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fns = 0usize;
    let mut tn = 0usize;
    for &i in test_idx {
        let (group, label) = &dataset.entries[i];
        let v = model.featurize(&group.strings, dictionary);
        let predicted_secret = model.score(&v) >= 0.5;
        match (predicted_secret, *label == Label::Secret) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fns += 1,
            (false, false) => tn += 1,
        }
    }
    let metrics = metrics_from_counts(tp, fp, fns, tn);
    Ok((model, metrics))
}

fn metrics_from_counts(tp: usize, fp: usize, fns: usize, tn: usize) -> Metrics {
    let p = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fns == 0 {
        0.0
    } else {
        tp as f64 / (tp + fns) as f64
    };
    let total = tp + fp + fns + tn;
    let accuracy = if total == 0 {
        0.0
    } else {
        (tp + tn) as f64 / total as f64
    };
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    Metrics {
        precision: p,
        recall: r,
        accuracy,
        f1,
    }
}

fn train_logistic(
    train: &[(Vec<(u32, f64)>, bool)],
    dims: usize,
) -> (ModelParams, BTreeMap<String, f64>) {
    const LR: f64 = 0.1;
    const EPOCHS: usize = 500;
    const L2: f64 = 1e-4;
    let rows: Vec<(Vec<(u32, f64)>, f64)> = train
        .iter()
        .map(|(row, y)| (normalize(row.clone()), if *y { 1.0 } else { 0.0 }))
        .collect();
    let n = rows.len() as f64;
    let mut w = vec![0.0; dims];
    let mut b = 0.0;
    for _ in 0..EPOCHS {
        let mut grad = vec![0.0; dims];
        let mut grad_b = 0.0;
        for (row, y) in &rows {
            let err = sigmoid(dot(&w, row) + b) - y;
            for &(i, v) in row {
                grad[i as usize] += err * v;
            }
            grad_b += err;
        }
        for i in 0..dims {
            w[i] -= LR * (grad[i] / n + L2 * w[i]);
        }
        b -= LR * grad_b / n;
    }
    let hyper = BTreeMap::from([
        ("learning_rate".to_string(), LR),
        ("epochs".to_string(), EPOCHS as f64),
        ("l2".to_string(), L2),
    ]);
    (ModelParams::Linear { weights: w, bias: b }, hyper)
}

fn train_naive_bayes(
    train: &[(Vec<(u32, f64)>, bool)],
    dims: usize,
) -> (ModelParams, BTreeMap<String, f64>) {
    const ALPHA: f64 = 1.0;
    let mut class_count = [0usize; 2];
    let mut feature_count = vec![[0.0f64; 2]; dims];
    let mut total = [0.0f64; 2];
    for (row, y) in train {
        let c = usize::from(*y);
        class_count[c] += 1;
        for &(i, v) in row {
            feature_count[i as usize][c] += v;
            total[c] += v;
        }
    }
    let n = train.len() as f64;
    let class_log_prior = [
        (class_count[0] as f64 / n).ln(),
        (class_count[1] as f64 / n).ln(),
    ];
    let feature_log_prob = feature_count
        .iter()
        .map(|fc| {
            [
                ((fc[0] + ALPHA) / (total[0] + ALPHA * dims as f64)).ln(),
                ((fc[1] + ALPHA) / (total[1] + ALPHA * dims as f64)).ln(),
            ]
        })
        .collect();
    let hyper = BTreeMap::from([("alpha".to_string(), ALPHA)]);
    (
        ModelParams::NaiveBayes {
            class_log_prior,
            feature_log_prob,
        },
        hyper,
    )
}

fn train_svc(
    train: &[(Vec<(u32, f64)>, bool)],
    dims: usize,
) -> (ModelParams, BTreeMap<String, f64>) {
    const LAMBDA: f64 = 1e-3;
    const EPOCHS: usize = 1000;
    let rows: Vec<(Vec<(u32, f64)>, f64)> = train
        .iter()
        .map(|(row, y)| (normalize(row.clone()), if *y { 1.0 } else { -1.0 }))
        .collect();
    let n = rows.len() as f64;
    // Bias lives in the last augmented slot.
    let mut w = vec![0.0; dims + 1];
    let radius = 1.0 / LAMBDA.sqrt();
    for t in 1..=EPOCHS {
        let eta = 1.0 / (LAMBDA * t as f64);
        let mut sub = vec![0.0; dims + 1];
        for (row, y) in &rows {
            let margin = y * (dot(&w, row) + w[dims]);
            if margin < 1.0 {
                for &(i, v) in row {
                    sub[i as usize] += y * v;
                }
                sub[dims] += y;
            }
        }
        for i in 0..=dims {
            w[i] = (1.0 - eta * LAMBDA) * w[i] + (eta / n) * sub[i];
        }
        // Pegasos projection onto the ball of radius 1/sqrt(lambda).
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            let scale = radius / norm;
            for v in &mut w {
                *v *= scale;
            }
        }
    }
    let bias = w.pop().expect("augmented bias slot");
    let hyper = BTreeMap::from([
        ("lambda".to_string(), LAMBDA),
        ("epochs".to_string(), EPOCHS as f64),
    ]);
    (ModelParams::Linear { weights: w, bias }, hyper)
}

/// Classifies one string group; score is the probability of `secret`.
pub fn predict_group(
    model: &TrainedModel,
    strings: &[String],
    dictionary: &Dictionary,
) -> (Label, f64) {
    let v = model.featurize(strings, dictionary);
    let score = model.score(&v);
    let label = if score >= 0.5 {
        Label::Secret
    } else {
        Label::NoSecret
    };
    (label, score)
}

/// Intrinsic-string verdict: is this single string secret-shaped?
/// Requires a char-ngram model.
pub fn intrinsic_classify(
    s: &str,
    model: &TrainedModel,
    dictionary: &Dictionary,
) -> Result<(bool, f64), LearnedError> {
    if s.is_empty() {
        return Err(LearnedError::EmptyString);
    }
    if model.scheme != Scheme::CharNgram {
        return Err(LearnedError::SchemeMismatch {
            model: model.scheme,
        });
    }
    let (label, score) = predict_group(model, &[s.to_string()], dictionary);
    Ok((label == Label::Secret, score))
}

/// Context-window verdict over the rendered statement window.
/// Requires a token-feature model (count or tfidf).
pub fn context_classify(
    window: &[String],
    model: &TrainedModel,
    dictionary: &Dictionary,
) -> Result<(bool, f64), LearnedError> {
    if window.is_empty() || window.iter().all(|l| l.trim().is_empty()) {
        return Err(LearnedError::EmptyWindow);
    }
    if !matches!(model.scheme, Scheme::CountFrequency | Scheme::Tfidf) {
        return Err(LearnedError::SchemeMismatch {
            model: model.scheme,
        });
    }
    let text = window.join("\n");
    let (label, score) = predict_group(model, &[text], dictionary);
    Ok((label == Label::Secret, score))
}

#[derive(Serialize, Deserialize)]
struct DatasetLine {
    group_id: String,
    strings: Vec<String>,
    label: Label,
}

/// Dataset files are JSON lines: `{"group_id", "strings", "label"}`.
pub fn load_dataset_jsonl(
    text: &str,
    variant: Variant,
) -> Result<LabeledGroupDataset, LearnedError> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: DatasetLine = serde_json::from_str(line)?;
        entries.push((
            StringGroup {
                app_id: String::new(),
                class_name: parsed.group_id,
                method_name: String::new(),
                strings: parsed.strings,
            },
            parsed.label,
        ));
    }
    Ok(LabeledGroupDataset { entries, variant })
}

pub fn dataset_to_jsonl(dataset: &LabeledGroupDataset) -> String {
    let mut out = String::new();
    for (group, label) in &dataset.entries {
        let line = DatasetLine {
            group_id: format!(
                "{}/{}/{}",
                group.app_id, group.class_name, group.method_name
            ),
            strings: group.strings.clone(),
            label: *label,
        };
        out.push_str(&serde_json::to_string(&line).expect("dataset line serializes"));
        out.push('\n');
    }
    out
}
