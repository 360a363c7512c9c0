//! Intrinsic-value detector: provider regexes, then entropy, word, and
//! character-pattern filters.
//!
//! Candidates are whole extracted string constants. A candidate survives
//! when every filter enabled for its matching rule passes; verdicts for all
//! filters are recorded even after the first failure so reports can
//! attribute exclusions per filter.

pub mod rules;

pub use rules::{
    CompiledRule, DetectionRule, FilterKind, PrecisionClass, RuleError, RuleSet,
    DEFAULT_RULES_JSON,
};

use crate::extract::StringOccurrence;
use crate::finding::{DetectorKind, Location, SecretFinding};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Embedded default dictionary for the word filter.
pub const DEFAULT_WORDS: &str = include_str!("../../data/words.txt");

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("entropy of the empty string is undefined")]
    EmptyString,
}

/// Shannon entropy in bits per character over the character frequency
/// distribution of `s`.
pub fn shannon_entropy(s: &str) -> Result<f64, EntropyError> {
    if s.is_empty() {
        return Err(EntropyError::EmptyString);
    }
    Ok(entropy_bits(s))
}

fn entropy_bits(s: &str) -> f64 {
    let mut freq: BTreeMap<char, u32> = BTreeMap::new();
    let mut len = 0u32;
    for c in s.chars() {
        *freq.entry(c).or_insert(0) += 1;
        len += 1;
    }
    if len == 0 {
        return 0.0;
    }
    let len = f64::from(len);
    freq.values()
        .map(|&count| {
            let p = f64::from(count) / len;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EntropySided {
    /// Fail when |entropy - mean| > 3σ, per "away from the mean".
    #[default]
    Two,
    /// Fail only when entropy < mean - 3σ.
    LowOnly,
}

/// Whether entropy statistics pool matches corpus-wide or per app.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EntropyScope {
    #[default]
    Corpus,
    App,
}

/// Per-group 3-sigma entropy rule using the population standard deviation.
/// Groups with fewer than two members pass (σ is undefined there).
pub fn entropy_filter(entropies: &[f64], sided: EntropySided) -> Vec<bool> {
    let n = entropies.len();
    if n < 2 {
        return vec![true; n];
    }
    let mean = entropies.iter().sum::<f64>() / n as f64;
    let var = entropies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n as f64;
    let sigma = var.sqrt();
    entropies
        .iter()
        .map(|&e| match sided {
            EntropySided::Two => (e - mean).abs() <= 3.0 * sigma,
            EntropySided::LowOnly => e >= mean - 3.0 * sigma,
        })
        .collect()
}

/// Lowercase English word list used by the word filter and the
/// english-word-extraction feature variant.
#[derive(Debug, Clone)]
pub struct Dictionary {
    words: Vec<String>,
    set: std::collections::BTreeSet<String>,
}

impl Dictionary {
    pub fn new(words: impl IntoIterator<Item = String>) -> Dictionary {
        let set: std::collections::BTreeSet<String> = words
            .into_iter()
            .map(|w| w.trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Dictionary {
            words: set.iter().cloned().collect(),
            set,
        }
    }

    /// One word per line, UTF-8.
    pub fn from_text(text: &str) -> Dictionary {
        Dictionary::new(text.lines().map(str::to_string))
    }

    pub fn default_dictionary() -> Dictionary {
        Dictionary::from_text(DEFAULT_WORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.set.contains(word)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Fails (returns false) iff the case-folded string contains any dictionary
/// word of length >= `min_word_len` as a contiguous substring.
pub fn word_filter(s: &str, dictionary: &Dictionary, min_word_len: usize) -> bool {
    let folded = s.to_lowercase();
    !dictionary
        .words
        .iter()
        .filter(|w| w.chars().count() >= min_word_len)
        .any(|w| folded.contains(w.as_str()))
}

/// Fails (returns false) iff the string contains `run_len` or more
/// consecutive identical characters, or characters whose code points
/// strictly ascend or descend by one.
pub fn pattern_filter(s: &str, run_len: usize) -> bool {
    assert!(run_len >= 2, "run_len must be at least 2");
    let chars: Vec<u32> = s.chars().map(|c| c as u32).collect();
    if chars.len() < run_len {
        return true;
    }
    let mut same = 1usize;
    let mut asc = 1usize;
    let mut desc = 1usize;
    for w in chars.windows(2) {
        same = if w[1] == w[0] { same + 1 } else { 1 };
        asc = if w[1] == w[0].wrapping_add(1) { asc + 1 } else { 1 };
        desc = if w[0] == w[1].wrapping_add(1) { desc + 1 } else { 1 };
        if same >= run_len || asc >= run_len || desc >= run_len {
            return false;
        }
    }
    true
}

/// Per-candidate record of what each filter decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub candidate: String,
    pub matched_rule: String,
    /// `None` when the filter is not enabled for the rule.
    pub entropy_pass: Option<bool>,
    pub word_pass: Option<bool>,
    pub pattern_pass: Option<bool>,
    /// Bits per character.
    pub entropy_bits: f64,
    pub accepted: bool,
}

/// One regex hit: indices into the scanned occurrence slice and the rule set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegexMatch {
    pub occurrence: usize,
    pub rule: usize,
}

/// Applies every rule to every occurrence. One occurrence may match several
/// rules; each (occurrence, rule) pair is recorded once.
pub fn scan_regex(occurrences: &[StringOccurrence], rules: &RuleSet) -> Vec<RegexMatch> {
    let mut out = Vec::new();
    for (occurrence, occ) in occurrences.iter().enumerate() {
        for rule in 0..rules.rules.len() {
            if rules.matches(rule, &occ.value) {
                out.push(RegexMatch { occurrence, rule });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ThreeLayerConfig {
    pub entropy_sided: EntropySided,
    pub entropy_scope: EntropyScope,
    pub run_len: usize,
    pub min_word_len: usize,
}

impl Default for ThreeLayerConfig {
    fn default() -> Self {
        ThreeLayerConfig {
            entropy_sided: EntropySided::Two,
            entropy_scope: EntropyScope::Corpus,
            run_len: 4,
            min_word_len: 5,
        }
    }
}

/// Runs the full detector over extracted occurrences (possibly spanning
/// several apps — entropy groups follow `entropy_scope`). Findings are
/// regex matches surviving all filters enabled for their rule, deduplicated
/// per app by `(value, provider)` with multiplicity recorded.
pub fn run_three_layer(
    occurrences: &[StringOccurrence],
    rules: &RuleSet,
    dictionary: &Dictionary,
    config: &ThreeLayerConfig,
) -> Vec<SecretFinding> {
    let matches = scan_regex(occurrences, rules);

    // Entropy statistics are computed per rule group (optionally split per
    // app); this is the corpus-wide barrier stage.
    let mut groups: BTreeMap<(usize, Option<&str>), Vec<usize>> = BTreeMap::new();
    for (mi, m) in matches.iter().enumerate() {
        let key = match config.entropy_scope {
            EntropyScope::Corpus => (m.rule, None),
            EntropyScope::App => (m.rule, Some(occurrences[m.occurrence].app_id.as_str())),
        };
        groups.entry(key).or_default().push(mi);
    }

    let entropies: Vec<f64> = matches
        .iter()
        .map(|m| entropy_bits(&occurrences[m.occurrence].value))
        .collect();

    let mut entropy_pass = vec![true; matches.len()];
    for members in groups.values() {
        let group_entropies: Vec<f64> = members.iter().map(|&mi| entropies[mi]).collect();
        let verdicts = entropy_filter(&group_entropies, config.entropy_sided);
        for (&mi, pass) in members.iter().zip(verdicts) {
            entropy_pass[mi] = pass;
        }
    }

    // Deduplicate per app by (value, provider), folding verdicts and
    // locations together.
    let mut merged: BTreeMap<(String, String, String), SecretFinding> = BTreeMap::new();
    for (mi, m) in matches.iter().enumerate() {
        let occ = &occurrences[m.occurrence];
        let rule = &rules.rules[m.rule].rule;
        let enabled = |f: FilterKind| rule.filters.contains(&f);

        let e_pass = enabled(FilterKind::Entropy).then_some(entropy_pass[mi]);
        let w_pass = enabled(FilterKind::Word)
            .then(|| word_filter(&occ.value, dictionary, config.min_word_len));
        let p_pass =
            enabled(FilterKind::Pattern).then(|| pattern_filter(&occ.value, config.run_len));
        let accepted = e_pass.unwrap_or(true) && w_pass.unwrap_or(true) && p_pass.unwrap_or(true);
        if !accepted {
            continue;
        }

        let verdict = FilterVerdict {
            candidate: occ.value.clone(),
            matched_rule: rule.provider.clone(),
            entropy_pass: e_pass,
            word_pass: w_pass,
            pattern_pass: p_pass,
            entropy_bits: entropies[mi],
            accepted,
        };

        let key = (occ.app_id.clone(), occ.value.clone(), rule.provider.clone());
        let location = Location {
            class: occ.class_name.clone(),
            method: occ.method_name.clone(),
            statement_index: occ.statement_index,
        };
        merged
            .entry(key)
            .and_modify(|f| {
                f.multiplicity += 1;
                f.locations.push(location.clone());
            })
            .or_insert_with(|| {
                let mut finding =
                    SecretFinding::new(&occ.app_id, &occ.value, &rule.provider, DetectorKind::ThreeLayer);
                finding.locations.push(location.clone());
                finding.confidence.insert(DetectorKind::ThreeLayer, 1.0);
                finding.filter_verdict = Some(verdict);
                finding
            });
    }

    merged.into_values().collect()
}

/// Every verdict (accepted or not) for reporting and regression analysis.
pub fn filter_verdicts(
    occurrences: &[StringOccurrence],
    rules: &RuleSet,
    dictionary: &Dictionary,
    config: &ThreeLayerConfig,
) -> Vec<FilterVerdict> {
    let matches = scan_regex(occurrences, rules);
    let mut groups: BTreeMap<(usize, Option<&str>), Vec<usize>> = BTreeMap::new();
    for (mi, m) in matches.iter().enumerate() {
        let key = match config.entropy_scope {
            EntropyScope::Corpus => (m.rule, None),
            EntropyScope::App => (m.rule, Some(occurrences[m.occurrence].app_id.as_str())),
        };
        groups.entry(key).or_default().push(mi);
    }
    let entropies: Vec<f64> = matches
        .iter()
        .map(|m| entropy_bits(&occurrences[m.occurrence].value))
        .collect();
    let mut entropy_pass = vec![true; matches.len()];
    for members in groups.values() {
        let group_entropies: Vec<f64> = members.iter().map(|&mi| entropies[mi]).collect();
        for (&mi, pass) in members
            .iter()
            .zip(entropy_filter(&group_entropies, config.entropy_sided))
        {
            entropy_pass[mi] = pass;
        }
    }
    matches
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let occ = &occurrences[m.occurrence];
            let rule = &rules.rules[m.rule].rule;
            let enabled = |f: FilterKind| rule.filters.contains(&f);
            let e_pass = enabled(FilterKind::Entropy).then_some(entropy_pass[mi]);
            let w_pass = enabled(FilterKind::Word)
                .then(|| word_filter(&occ.value, dictionary, config.min_word_len));
            let p_pass =
                enabled(FilterKind::Pattern).then(|| pattern_filter(&occ.value, config.run_len));
            FilterVerdict {
                candidate: occ.value.clone(),
                matched_rule: rule.provider.clone(),
                entropy_pass: e_pass,
                word_pass: w_pass,
                pattern_pass: p_pass,
                entropy_bits: entropies[mi],
                accepted: e_pass.unwrap_or(true)
                    && w_pass.unwrap_or(true)
                    && p_pass.unwrap_or(true),
            }
        })
        .collect()
}
