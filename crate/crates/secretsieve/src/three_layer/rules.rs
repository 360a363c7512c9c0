//! Provider regex catalog: loading, validation, and compilation.
//!
//! Rules ship as data (`data/rules.json`) so catalog corrections never need
//! a rebuild. `precise` rules match as a substring of the candidate string;
//! `loose` rules must match the entire candidate, since length-ranged
//! alphanumeric patterns would otherwise fire inside every long string.

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Embedded default catalog.
pub const DEFAULT_RULES_JSON: &str = include_str!("../../data/rules.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionClass {
    Precise,
    Loose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Entropy,
    Word,
    Pattern,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionRule {
    pub provider: String,
    pub pattern: String,
    pub precision_class: PrecisionClass,
    /// Which of the three filters apply to this rule's candidates.
    pub filters: Vec<FilterKind>,
}

/// A compiled rule; `regex` is anchored for loose rules.
#[derive(Debug, Clone)]
pub struct CompiledRule {
    pub rule: DetectionRule,
    pub regex: Regex,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub rules: Vec<CompiledRule>,
}

#[derive(Debug, thiserror::Error)]
pub enum RuleError {
    #[error("rule file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule {provider}: pattern `{pattern}` failed to compile: {source}")]
    RuleCompile {
        provider: String,
        pattern: String,
        source: regex::Error,
    },
    #[error("rule has empty provider name")]
    EmptyProvider,
}

impl RuleSet {
    /// Compiles a catalog, failing fast so scan time never sees a bad regex.
    pub fn compile(rules: Vec<DetectionRule>) -> Result<RuleSet, RuleError> {
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            if rule.provider.is_empty() {
                return Err(RuleError::EmptyProvider);
            }
            let source = match rule.precision_class {
                PrecisionClass::Precise => rule.pattern.clone(),
                PrecisionClass::Loose => format!("^(?:{})$", rule.pattern),
            };
            let regex = Regex::new(&source).map_err(|source| RuleError::RuleCompile {
                provider: rule.provider.clone(),
                pattern: rule.pattern.clone(),
                source,
            })?;
            compiled.push(CompiledRule { rule, regex });
        }
        Ok(RuleSet { rules: compiled })
    }

    pub fn from_json(json: &str) -> Result<RuleSet, RuleError> {
        let rules: Vec<DetectionRule> = serde_json::from_str(json)?;
        RuleSet::compile(rules)
    }

    pub fn default_catalog() -> RuleSet {
        RuleSet::from_json(DEFAULT_RULES_JSON).expect("embedded rule catalog must compile")
    }

    /// Does `candidate` match rule `idx` under its anchoring?
    pub fn matches(&self, idx: usize, candidate: &str) -> bool {
        if candidate.is_empty() {
            return false;
        }
        self.rules[idx].regex.is_match(candidate)
    }
}
