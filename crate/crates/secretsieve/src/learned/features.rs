//! Feature extraction: character histograms, character n-grams, token
//! counts, TF-IDF weighting, and cosine similarity.
//!
//! Three dataset variants are supported. `case_sensitive` uses the raw
//! strings, `case_insensitive` folds everything to lowercase first, and
//! `english_word_extraction` keeps only tokens found in the dictionary.

use crate::three_layer::Dictionary;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CharHistogram,
    Tfidf,
    CountFrequency,
    CharNgram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    CaseSensitive,
    CaseInsensitive,
    EnglishWordExtraction,
}

impl Variant {
    pub fn parse(name: &str) -> Option<Variant> {
        match name {
            "case_sensitive" => Some(Variant::CaseSensitive),
            "case_insensitive" => Some(Variant::CaseInsensitive),
            "english_word_extraction" => Some(Variant::EnglishWordExtraction),
            _ => None,
        }
    }

    pub const ALL: [Variant; 3] = [
        Variant::CaseSensitive,
        Variant::CaseInsensitive,
        Variant::EnglishWordExtraction,
    ];
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("empty string group")]
    EmptyGroup,
    #[error("cosine similarity of a zero vector is undefined")]
    ZeroVector,
    #[error("vectors have different scheme or variant")]
    SchemeMismatch,
}

/// Sparse non-negative feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub scheme: Scheme,
    pub variant: Variant,
    pub dims: BTreeMap<u32, f64>,
}

impl FeatureVector {
    pub fn norm(&self) -> f64 {
        self.dims.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.values().all(|v| *v == 0.0)
    }
}

/// Group content after variant preprocessing, concatenated in order.
fn group_content(strings: &[String], variant: Variant, dictionary: &Dictionary) -> String {
    match variant {
        Variant::CaseSensitive => strings.concat(),
        Variant::CaseInsensitive => strings
            .iter()
            .map(|s| s.to_lowercase())
            .collect::<Vec<_>>()
            .concat(),
        Variant::EnglishWordExtraction => strings
            .iter()
            .flat_map(|s| tokenize(s, Variant::EnglishWordExtraction, dictionary))
            .collect::<Vec<_>>()
            .concat(),
    }
}

/// 256-bin byte histogram of the concatenated group content.
pub fn char_vector(
    strings: &[String],
    variant: Variant,
    dictionary: &Dictionary,
) -> Result<FeatureVector, FeatureError> {
    if strings.is_empty() {
        return Err(FeatureError::EmptyGroup);
    }
    let content = group_content(strings, variant, dictionary);
    let mut dims: BTreeMap<u32, f64> = BTreeMap::new();
    for byte in content.bytes() {
        *dims.entry(u32::from(byte)).or_insert(0.0) += 1.0;
    }
    Ok(FeatureVector {
        scheme: Scheme::CharHistogram,
        variant,
        dims,
    })
}

/// `x . y / (|x| * |y|)`, with a merge join over the sorted sparse entries.
pub fn cosine_similarity(x: &FeatureVector, y: &FeatureVector) -> Result<f64, FeatureError> {
    if x.scheme != y.scheme || x.variant != y.variant {
        return Err(FeatureError::SchemeMismatch);
    }
    let nx = x.norm();
    let ny = y.norm();
    if nx == 0.0 || ny == 0.0 {
        return Err(FeatureError::ZeroVector);
    }
    let mut dot = 0.0;
    let mut xs = x.dims.iter();
    let mut ys = y.dims.iter();
    let mut a = xs.next();
    let mut b = ys.next();
    while let (Some((ka, va)), Some((kb, vb))) = (a, b) {
        match ka.cmp(kb) {
            std::cmp::Ordering::Less => a = xs.next(),
            std::cmp::Ordering::Greater => b = ys.next(),
            std::cmp::Ordering::Equal => {
                dot += va * vb;
                a = xs.next();
                b = ys.next();
            }
        }
    }
    Ok(dot / (nx * ny))
}

/// Splits into identifier-shaped tokens and keeps those of length >= 2.
/// Underscores stay inside tokens so compound terms like `refresh_token`
/// count as one term. `english_word_extraction` instead splits at every
/// non-alphanumeric character (underscores included), lowercases, and keeps
/// only dictionary words; `case_insensitive` lowercases.
pub fn tokenize(s: &str, variant: Variant, dictionary: &Dictionary) -> Vec<String> {
    let folded;
    let src = match variant {
        Variant::CaseSensitive => s,
        Variant::CaseInsensitive | Variant::EnglishWordExtraction => {
            folded = s.to_lowercase();
            &folded
        }
    };
    let split_underscore = variant == Variant::EnglishWordExtraction;
    src.split(|c: char| !(c.is_alphanumeric() || (c == '_' && !split_underscore)))
        .filter(|t| t.chars().count() >= 2)
        .filter(|t| variant != Variant::EnglishWordExtraction || dictionary.contains(t))
        .map(str::to_string)
        .collect()
}

/// Tokens of a whole group, in string order.
pub fn group_tokens(strings: &[String], variant: Variant, dictionary: &Dictionary) -> Vec<String> {
    strings
        .iter()
        .flat_map(|s| tokenize(s, variant, dictionary))
        .collect()
}

/// Character n-grams (n = 1 and 2) of the variant-preprocessed content,
/// used by the intrinsic-string model.
pub fn char_ngrams(strings: &[String], variant: Variant, dictionary: &Dictionary) -> Vec<String> {
    let content = group_content(strings, variant, dictionary);
    let chars: Vec<char> = content.chars().collect();
    let mut out: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
    for w in chars.windows(2) {
        out.push(w.iter().collect());
    }
    out
}

/// Term frequency: raw occurrence count of `term` in the group's tokens.
pub fn tf(term: &str, tokens: &[String]) -> f64 {
    tokens.iter().filter(|t| *t == term).count() as f64
}

/// Inverse document frequency: `log10(total docs / docs containing term)`.
/// A term present in every document contributes zero weight.
pub fn idf(doc_count: usize, docs_with_term: usize) -> f64 {
    if docs_with_term == 0 || doc_count == 0 {
        return 0.0;
    }
    (doc_count as f64 / docs_with_term as f64).log10()
}

/// Frozen term -> dense index mapping. Terms are sorted, so the mapping is
/// deterministic for a given training set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Vocabulary {
    pub terms: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn build<'a>(token_lists: impl IntoIterator<Item = &'a Vec<String>>) -> Vocabulary {
        let mut unique: std::collections::BTreeSet<&str> = Default::default();
        for tokens in token_lists {
            for t in tokens {
                unique.insert(t);
            }
        }
        Vocabulary {
            terms: unique
                .into_iter()
                .enumerate()
                .map(|(i, t)| (t.to_string(), i as u32))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index(&self, term: &str) -> Option<u32> {
        self.terms.get(term).copied()
    }
}

/// Raw token counts over a frozen vocabulary; unknown terms weigh zero.
pub fn count_vector(tokens: &[String], vocab: &Vocabulary, variant: Variant) -> FeatureVector {
    let mut dims: BTreeMap<u32, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index(t) {
            *dims.entry(i).or_insert(0.0) += 1.0;
        }
    }
    FeatureVector {
        scheme: Scheme::CountFrequency,
        variant,
        dims,
    }
}

/// Per-term IDF for a token-list corpus, indexed by the vocabulary.
pub fn idf_table(token_lists: &[Vec<String>], vocab: &Vocabulary) -> Vec<f64> {
    let mut df = vec![0usize; vocab.len()];
    for tokens in token_lists {
        let mut seen = vec![false; vocab.len()];
        for t in tokens {
            if let Some(i) = vocab.index(t) {
                let i = i as usize;
                if !seen[i] {
                    seen[i] = true;
                    df[i] += 1;
                }
            }
        }
    }
    df.iter().map(|&d| idf(token_lists.len(), d)).collect()
}

/// TF-IDF weights: raw term frequency times the corpus IDF.
pub fn tfidf_vector(
    tokens: &[String],
    vocab: &Vocabulary,
    idf: &[f64],
    variant: Variant,
) -> FeatureVector {
    let mut dims: BTreeMap<u32, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index(t) {
            *dims.entry(i).or_insert(0.0) += 1.0;
        }
    }
    for (i, v) in dims.iter_mut() {
        *v *= idf[*i as usize];
    }
    dims.retain(|_, v| *v != 0.0);
    FeatureVector {
        scheme: Scheme::Tfidf,
        variant,
        dims,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> Dictionary {
        Dictionary::default_dictionary()
    }

    fn vec_of(pairs: &[(u32, f64)]) -> FeatureVector {
        FeatureVector {
            scheme: Scheme::CountFrequency,
            variant: Variant::CaseSensitive,
            dims: pairs.iter().copied().collect(),
        }
    }

    #[test]
    fn char_vector_counts_bytes() {
        let v = char_vector(
            &["aa".to_string(), "b".to_string()],
            Variant::CaseSensitive,
            &dict(),
        )
        .unwrap();
        assert_eq!(v.dims.get(&(b'a' as u32)), Some(&2.0));
        assert_eq!(v.dims.get(&(b'b' as u32)), Some(&1.0));
        assert_eq!(v.dims.len(), 2);
    }

    #[test]
    fn char_vector_case_insensitive_folds() {
        let v = char_vector(&["Ab".to_string()], Variant::CaseInsensitive, &dict()).unwrap();
        assert_eq!(v.dims.get(&(b'a' as u32)), Some(&1.0));
        assert_eq!(v.dims.get(&(b'b' as u32)), Some(&1.0));
    }

    #[test]
    fn char_vector_empty_group_errors() {
        assert_eq!(
            char_vector(&[], Variant::CaseSensitive, &dict()),
            Err(FeatureError::EmptyGroup)
        );
    }

    #[test]
    fn table5_group_histogram_is_lowercase_plus_underscore() {
        let group: Vec<String> = [
            "grant_type",
            "refresh_token",
            "client_id",
            "client_secret",
            "refresh_token",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let v = char_vector(&group, Variant::CaseSensitive, &dict()).unwrap();
        let total: f64 = v.dims.values().sum();
        let lower_and_underscore: f64 = v
            .dims
            .iter()
            .filter(|(k, _)| {
                let c = **k as u8 as char;
                c.is_ascii_lowercase() || c == '_'
            })
            .map(|(_, v)| *v)
            .sum();
        assert_eq!(total, lower_and_underscore);
        assert_eq!(v.dims.get(&(b'_' as u32)), Some(&5.0));
    }

    #[test]
    fn cosine_identities() {
        let x = vec_of(&[(0, 1.0), (1, 1.0)]);
        assert!((cosine_similarity(&x, &x).unwrap() - 1.0).abs() < 1e-12);

        let y = vec_of(&[(2, 3.0)]);
        assert_eq!(cosine_similarity(&x, &y).unwrap(), 0.0);

        let z = vec_of(&[(0, 1.0)]);
        let got = cosine_similarity(&x, &z).unwrap();
        assert!((got - 1.0 / 2f64.sqrt()).abs() < 1e-12, "{got}");
    }

    #[test]
    fn cosine_zero_vector_errors() {
        let x = vec_of(&[(0, 1.0)]);
        let z = vec_of(&[]);
        assert_eq!(cosine_similarity(&x, &z), Err(FeatureError::ZeroVector));
    }

    #[test]
    fn cosine_is_one_exactly_for_positive_multiples() {
        let x = vec_of(&[(0, 1.0), (3, 2.0)]);
        let y = vec_of(&[(0, 2.0), (3, 4.0)]);
        assert!((cosine_similarity(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let z = vec_of(&[(0, 2.0), (3, 3.0)]);
        assert!(cosine_similarity(&x, &z).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn cosine_rejects_mismatched_variant() {
        let x = vec_of(&[(0, 1.0)]);
        let mut y = vec_of(&[(0, 1.0)]);
        y.variant = Variant::CaseInsensitive;
        assert_eq!(cosine_similarity(&x, &y), Err(FeatureError::SchemeMismatch));
    }

    #[test]
    fn tokenizer_keeps_compound_terms_and_drops_singletons() {
        let tokens = tokenize("grant_type=x refresh_token!", Variant::CaseSensitive, &dict());
        assert_eq!(tokens, vec!["grant_type", "refresh_token"]);
    }

    #[test]
    fn english_word_extraction_keeps_only_dictionary_tokens() {
        let tokens = tokenize(
            "Builder xQz9 google TOKEN",
            Variant::EnglishWordExtraction,
            &dict(),
        );
        assert_eq!(tokens, vec!["builder", "google", "token"]);
    }

    #[test]
    fn tf_counts_repeats_in_table5_group() {
        let group: Vec<String> = [
            "grant_type",
            "refresh_token",
            "client_id",
            "client_secret",
            "refresh_token",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let tokens = group_tokens(&group, Variant::CaseSensitive, &dict());
        assert_eq!(tf("refresh_token", &tokens), 2.0);
        assert_eq!(tf("grant_type", &tokens), 1.0);
        assert_eq!(tf("missing", &tokens), 0.0);
    }

    #[test]
    fn idf_identities() {
        assert_eq!(idf(10, 10), 0.0);
        assert!((idf(10, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variant_consistency_case_insensitive_equals_lowercased_sensitive() {
        let d = dict();
        let strings = vec!["AbC_dEf".to_string(), "GhI".to_string()];
        let lowered: Vec<String> = strings.iter().map(|s| s.to_lowercase()).collect();
        let a = char_vector(&strings, Variant::CaseInsensitive, &d).unwrap();
        let b = char_vector(&lowered, Variant::CaseSensitive, &d).unwrap();
        assert_eq!(a.dims, b.dims);
    }
}
