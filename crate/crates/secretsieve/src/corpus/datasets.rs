//! Labeled datasets derived from a generated corpus and its manifest:
//! string groups for the group classifier and the separability study,
//! single strings for the intrinsic model, and rendered statement windows
//! for the context model.

use super::gen::GeneratedCorpus;
use crate::extract::{self, StringGroup};
use crate::ir::{self, IrApp};
use crate::learned::{Label, LabeledGroupDataset, Variant};
use std::collections::BTreeSet;

/// One entry per method group of at least `min_size` strings, labeled
/// secret when the group contains a manifest value of its app.
pub fn labeled_groups(
    corpus: &GeneratedCorpus,
    min_size: usize,
    variant: Variant,
) -> LabeledGroupDataset {
    let mut entries = Vec::new();
    for app in &corpus.apps {
        let secrets: BTreeSet<&str> = corpus
            .manifest
            .entries
            .iter()
            .filter(|e| e.app_id == app.app_id)
            .map(|e| e.value.as_str())
            .collect();
        for group in extract::build_string_groups(app, min_size) {
            let label = if group.strings.iter().any(|s| secrets.contains(s.as_str())) {
                Label::Secret
            } else {
                Label::NoSecret
            };
            entries.push((group, label));
        }
    }
    LabeledGroupDataset { entries, variant }
}

/// Singleton-string entries: every manifest value as `secret`, ordinary
/// occurrence values as `no_secret`, capped per class.
pub fn labeled_strings(
    corpus: &GeneratedCorpus,
    max_per_class: usize,
    variant: Variant,
) -> LabeledGroupDataset {
    let secrets: BTreeSet<&str> = corpus
        .manifest
        .entries
        .iter()
        .map(|e| e.value.as_str())
        .collect();
    let mut positives: Vec<String> = Vec::new();
    let mut negatives: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for value in &secrets {
        if positives.len() < max_per_class {
            positives.push(value.to_string());
        }
    }
    for app in &corpus.apps {
        for occ in extract::extract_occurrences(app) {
            if occ.value.is_empty() || secrets.contains(occ.value.as_str()) {
                continue;
            }
            if negatives.len() >= max_per_class {
                break;
            }
            if seen.insert(occ.value.clone()) {
                negatives.push(occ.value);
            }
        }
    }
    let singleton = |value: String, idx: usize, label: Label| {
        (
            StringGroup {
                app_id: String::new(),
                class_name: format!("s{idx}"),
                method_name: String::new(),
                strings: vec![value],
            },
            label,
        )
    };
    let mut entries = Vec::new();
    for (i, v) in positives.into_iter().enumerate() {
        entries.push(singleton(v, i, Label::Secret));
    }
    for (i, v) in negatives.into_iter().enumerate() {
        entries.push(singleton(v, i + 1_000_000, Label::NoSecret));
    }
    LabeledGroupDataset { entries, variant }
}

/// Renders the window around a statement as one text blob per line.
pub fn rendered_window(
    app: &IrApp,
    class: &str,
    method_display: &str,
    index: usize,
    radius: usize,
) -> Option<Vec<String>> {
    let unit = app.find_class(class)?;
    let method = unit
        .methods
        .iter()
        .find(|m| extract::method_display(m) == method_display)?;
    let window = ir::method_window(method, index, radius).ok()?;
    Some(window.iter().map(|s| s.render()).collect())
}

/// Context-window entries: positive windows around each manifest location,
/// negative windows centered in methods without any seeded value, capped to
/// stay roughly balanced.
pub fn labeled_windows(
    corpus: &GeneratedCorpus,
    radius: usize,
    variant: Variant,
) -> LabeledGroupDataset {
    let mut entries = Vec::new();
    let mut positives = 0usize;
    for entry in &corpus.manifest.entries {
        let Some(app) = corpus.apps.iter().find(|a| a.app_id == entry.app_id) else {
            continue;
        };
        let Some(window) = rendered_window(app, &entry.class, &entry.method, entry.index, radius)
        else {
            continue;
        };
        entries.push((
            StringGroup {
                app_id: entry.app_id.clone(),
                class_name: entry.class.clone(),
                method_name: entry.method.clone(),
                strings: vec![window.join("\n")],
            },
            Label::Secret,
        ));
        positives += 1;
    }
    let seeded_methods: BTreeSet<(String, String, String)> = corpus
        .manifest
        .entries
        .iter()
        .map(|e| (e.app_id.clone(), e.class.clone(), e.method.clone()))
        .collect();
    let mut negatives = 0usize;
    'outer: for app in &corpus.apps {
        for class in &app.classes {
            for method in &class.methods {
                if method.body.is_empty() {
                    continue;
                }
                let key = (
                    app.app_id.clone(),
                    class.qualified_name.clone(),
                    extract::method_display(method),
                );
                if seeded_methods.contains(&key) {
                    continue;
                }
                if negatives >= positives.max(10) {
                    break 'outer;
                }
                let center = method.body.len() / 2;
                let window = ir::method_window(method, center, radius)
                    .expect("center in bounds")
                    .iter()
                    .map(|s| s.render())
                    .collect::<Vec<_>>();
                entries.push((
                    StringGroup {
                        app_id: key.0.clone(),
                        class_name: key.1.clone(),
                        method_name: key.2.clone(),
                        strings: vec![window.join("\n")],
                    },
                    Label::NoSecret,
                ));
                negatives += 1;
            }
        }
    }
    LabeledGroupDataset { entries, variant }
}
