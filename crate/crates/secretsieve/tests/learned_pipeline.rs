//! Behavior of the learned detectors end to end: intrinsic and context
//! models trained on generated corpora and applied to held-out inputs.

use secretsieve::corpus::{
    gen_corpus, labeled_strings, labeled_windows, GenSpec, NoiseProfile, Placement, SeedSpec,
};
use secretsieve::engine::CONTEXT_WINDOW_RADIUS;
use secretsieve::learned::{
    context_classify, fit, intrinsic_classify, ModelKind, Scheme, Variant,
};
use secretsieve::sig_flow::default_signatures;
use secretsieve::three_layer::Dictionary;

fn training_corpus(seed: u64) -> secretsieve::corpus::GeneratedCorpus {
    gen_corpus(
        &GenSpec {
            n_apps: 40,
            seeds: vec![
                SeedSpec {
                    provider: "google".into(),
                    placement: Placement::LiteralArg,
                    key_format: r"AIza[0-9A-Za-z\-_]{35}".into(),
                    count: 40,
                },
                SeedSpec {
                    provider: "microsoft".into(),
                    placement: Placement::LiteralArg,
                    key_format: "[A-Za-z0-9+/]{86}==".into(),
                    count: 20,
                },
            ],
            noise: NoiseProfile::default(),
        },
        &default_signatures(),
        seed,
    )
    .unwrap()
}

#[test]
fn intrinsic_model_separates_keys_from_ordinary_strings() {
    let corpus = training_corpus(9101);
    let dict = Dictionary::default_dictionary();
    let data = labeled_strings(&corpus, 400, Variant::CaseSensitive);
    let (model, metrics) = fit(
        &data,
        ModelKind::LogisticRegression,
        Scheme::CharNgram,
        91,
        &dict,
    )
    .unwrap();
    assert!(metrics.f1 > 0.8, "intrinsic model too weak: {metrics:?}");

    // Constant strings are never secret-shaped.
    let (is_candidate, score) = intrinsic_classify("aaaaaaaa", &model, &dict).unwrap();
    assert!(!is_candidate, "constant string scored {score}");

    // A fresh generated key (not in the training corpus) is.
    let eval = training_corpus(9102);
    let fresh = &eval.manifest.entries[0].value;
    let (is_candidate, _) = intrinsic_classify(fresh, &model, &dict).unwrap();
    assert!(is_candidate, "fresh key {fresh} rejected");
}

#[test]
fn context_model_separates_api_windows_from_plain_statements() {
    let corpus = training_corpus(9201);
    let dict = Dictionary::default_dictionary();
    let windows = labeled_windows(&corpus, CONTEXT_WINDOW_RADIUS, Variant::CaseSensitive);
    let (model, metrics) = fit(
        &windows,
        ModelKind::LogisticRegression,
        Scheme::CountFrequency,
        92,
        &dict,
    )
    .unwrap();
    assert!(metrics.f1 > 0.8, "context model too weak: {metrics:?}");

    // A window full of credential-handling calls classifies positive.
    let positive = vec![
        "$c0 = \"client_id\"".to_string(),
        "$c1 = \"refresh_token\"".to_string(),
        "virtualinvoke $api.<com.google.firebase.FirebaseOptions$Builder: com.google.firebase.FirebaseOptions$Builder setApiKey(java.lang.String)>($k)".to_string(),
    ];
    let (hit, _) = context_classify(&positive, &model, &dict).unwrap();
    assert!(hit, "credential window not recognized");

    // A window of plain data shuffling classifies negative.
    let negative = vec![
        "$v1 = $v0".to_string(),
        "$v2 = $v1".to_string(),
        "return".to_string(),
    ];
    let (hit, _) = context_classify(&negative, &model, &dict).unwrap();
    assert!(!hit, "plain window misclassified");
}
