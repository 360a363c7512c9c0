//! Scan configuration, asset loading, and the JSON override file pointed to
//! by `SECRETSIEVE_CONFIG` (values present there take precedence over
//! flags).

use crate::finding::DetectorKind;
use crate::learned::TrainedModel;
use crate::sig_flow::{ApiSignature, EnvConfig, EnvGetter, SliceBudget};
use crate::three_layer::{Dictionary, EntropyScope, EntropySided, RuleSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub detectors: BTreeSet<DetectorKind>,
    pub rules_path: Option<PathBuf>,
    pub signatures_path: Option<PathBuf>,
    pub dictionary_path: Option<PathBuf>,
    pub intrinsic_model_path: Option<PathBuf>,
    pub context_model_path: Option<PathBuf>,
    pub group_model_path: Option<PathBuf>,
    pub slice_budget: SliceBudget,
    pub entropy_sided: EntropySided,
    pub entropy_scope: EntropyScope,
    pub run_len: usize,
    pub min_word_len: usize,
    pub mask: bool,
    pub jobs: Option<usize>,
    pub env_getters: Vec<EnvGetter>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            detectors: BTreeSet::from([DetectorKind::ThreeLayer, DetectorKind::SigFlow]),
            rules_path: None,
            signatures_path: None,
            dictionary_path: None,
            intrinsic_model_path: None,
            context_model_path: None,
            group_model_path: None,
            slice_budget: SliceBudget::default(),
            entropy_sided: EntropySided::Two,
            entropy_scope: EntropyScope::Corpus,
            run_len: 4,
            min_word_len: 5,
            mask: true,
            jobs: None,
            env_getters: EnvConfig::standard_getters(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("no detector enabled")]
    NoDetectors,
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
    #[error("detector {0} requires a model file")]
    MissingModel(DetectorKind),
    #[error("unknown detector name `{0}`")]
    UnknownDetector(String),
    #[error(transparent)]
    Rules(#[from] crate::three_layer::RuleError),
    #[error(transparent)]
    Signatures(#[from] crate::sig_flow::SignatureError),
    #[error("failed to load model: {0}")]
    Model(#[from] crate::learned::LearnedError),
    #[error("config file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn read(path: &Path) -> Result<String, ConfigError> {
    if !path.exists() {
        return Err(ConfigError::MissingFile(path.to_path_buf()));
    }
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Everything a scan needs, loaded and validated up front so rule or
/// signature problems surface before any app is parsed.
pub struct ScanAssets {
    pub rules: RuleSet,
    pub signatures: Vec<ApiSignature>,
    pub dictionary: Dictionary,
    pub intrinsic_model: Option<TrainedModel>,
    pub context_model: Option<TrainedModel>,
    pub group_model: Option<TrainedModel>,
}

impl ScanAssets {
    pub fn load(config: &ScanConfig) -> Result<ScanAssets, ConfigError> {
        if config.detectors.is_empty() {
            return Err(ConfigError::NoDetectors);
        }
        let rules = match &config.rules_path {
            Some(p) => RuleSet::from_json(&read(p)?)?,
            None => RuleSet::default_catalog(),
        };
        let signatures = match &config.signatures_path {
            Some(p) => crate::sig_flow::load_signatures(&read(p)?)?,
            None => crate::sig_flow::default_signatures(),
        };
        let dictionary = match &config.dictionary_path {
            Some(p) => Dictionary::from_text(&read(p)?),
            None => Dictionary::default_dictionary(),
        };
        let load_model = |path: &Option<PathBuf>,
                          detector: DetectorKind|
         -> Result<Option<TrainedModel>, ConfigError> {
            if !config.detectors.contains(&detector) {
                return Ok(None);
            }
            match path {
                Some(p) => Ok(Some(TrainedModel::from_json(&read(p)?)?)),
                None => Err(ConfigError::MissingModel(detector)),
            }
        };
        let intrinsic_model = load_model(&config.intrinsic_model_path, DetectorKind::Intrinsic)?;
        let context_model = load_model(&config.context_model_path, DetectorKind::Context)?;
        let group_model = load_model(&config.group_model_path, DetectorKind::StringGroup)?;
        Ok(ScanAssets {
            rules,
            signatures,
            dictionary,
            intrinsic_model,
            context_model,
            group_model,
        })
    }
}

/// JSON override file. Any field present replaces the corresponding
/// configuration value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverride {
    pub detectors: Option<Vec<String>>,
    pub rules: Option<PathBuf>,
    pub signatures: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub intrinsic_model: Option<PathBuf>,
    pub context_model: Option<PathBuf>,
    pub group_model: Option<PathBuf>,
    pub entropy_sided: Option<EntropySided>,
    pub entropy_scope: Option<EntropyScope>,
    pub run_len: Option<usize>,
    pub min_word_len: Option<usize>,
    pub mask: Option<bool>,
    pub jobs: Option<usize>,
    pub slice_max_depth: Option<usize>,
    pub slice_max_steps: Option<usize>,
    pub slice_max_fanout: Option<usize>,
}

impl ConfigOverride {
    pub fn from_json(text: &str) -> Result<ConfigOverride, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn apply(&self, config: &mut ScanConfig) -> Result<(), ConfigError> {
        if let Some(names) = &self.detectors {
            let mut set = BTreeSet::new();
            for name in names {
                set.insert(
                    DetectorKind::parse(name)
                        .ok_or_else(|| ConfigError::UnknownDetector(name.clone()))?,
                );
            }
            config.detectors = set;
        }
        macro_rules! set_path {
            ($field:ident, $target:ident) => {
                if let Some(v) = &self.$field {
                    config.$target = Some(v.clone());
                }
            };
        }
        set_path!(rules, rules_path);
        set_path!(signatures, signatures_path);
        set_path!(dictionary, dictionary_path);
        set_path!(intrinsic_model, intrinsic_model_path);
        set_path!(context_model, context_model_path);
        set_path!(group_model, group_model_path);
        if let Some(v) = self.entropy_sided {
            config.entropy_sided = v;
        }
        if let Some(v) = self.entropy_scope {
            config.entropy_scope = v;
        }
        if let Some(v) = self.run_len {
            config.run_len = v;
        }
        if let Some(v) = self.min_word_len {
            config.min_word_len = v;
        }
        if let Some(v) = self.mask {
            config.mask = v;
        }
        if let Some(v) = self.jobs {
            config.jobs = Some(v);
        }
        if let Some(v) = self.slice_max_depth {
            config.slice_budget.max_depth = v;
        }
        if let Some(v) = self.slice_max_steps {
            config.slice_budget.max_steps = v;
        }
        if let Some(v) = self.slice_max_fanout {
            config.slice_budget.max_fanout = v;
        }
        Ok(())
    }
}
