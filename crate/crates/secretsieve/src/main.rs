//! secretsieve command line: scan corpora, train models, evaluate against a
//! manifest, generate corpora, and run the separability study.
//!
//! Exit codes: 0 scan ok (findings or not), 1 usage or configuration error,
//! 2 corpus unreadable. `SECRETSIEVE_CONFIG` may point at a JSON file whose
//! values override flags.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use secretsieve::corpus::{self, GenSpec};
use secretsieve::engine::{
    self, emit_report, ConfigOverride, ReportFormat, ScanConfig, ScanError,
};
use secretsieve::extract;
use secretsieve::finding::DetectorKind;
use secretsieve::learned::{self, ModelKind, Scheme, Variant};
use secretsieve::sig_flow::default_signatures;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "secretsieve",
    version,
    about = "Checked-in secret scanner for Jimple-like IR corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a corpus directory and emit a report.
    Scan {
        corpus: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        sigs: Option<PathBuf>,
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Comma-separated detectors:
        /// three_layer,sig_flow,intrinsic,context,string_group.
        #[arg(long)]
        detectors: Option<String>,
        #[arg(long)]
        intrinsic_model: Option<PathBuf>,
        #[arg(long)]
        context_model: Option<PathBuf>,
        #[arg(long)]
        group_model: Option<PathBuf>,
        /// Mask secret values in output (default).
        #[arg(long, conflicts_with = "unmask")]
        mask: bool,
        /// Print secret values in full; requires --acknowledge-sensitive.
        #[arg(long)]
        unmask: bool,
        /// Confirm that printing live secrets is intended.
        #[arg(long)]
        acknowledge_sensitive: bool,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write every extracted string occurrence as CSV.
        #[arg(long)]
        dump_occurrences: Option<PathBuf>,
    },
    /// Train a string-group / intrinsic / context model on a JSONL dataset.
    Train {
        dataset: PathBuf,
        #[arg(long)]
        model_kind: String,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        variant: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dict: Option<PathBuf>,
    },
    /// Scan a corpus and score findings against a ground-truth manifest.
    Eval {
        corpus: PathBuf,
        manifest: PathBuf,
        #[arg(long)]
        detectors: Option<String>,
        #[arg(long)]
        intrinsic_model: Option<PathBuf>,
        #[arg(long)]
        context_model: Option<PathBuf>,
        #[arg(long)]
        group_model: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate a synthetic corpus with a ground-truth manifest.
    GenCorpus {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also emit labeled datasets (groups, strings, windows) for
        /// `train` and `study`.
        #[arg(long)]
        emit_datasets: bool,
    },
    /// Separability study between two string-group collections.
    Study {
        secret: PathBuf,
        nosecret: PathBuf,
        #[arg(long, default_value = "case_sensitive")]
        variant: String,
        /// Cap on compared pairs per sample (deterministic subsample).
        #[arg(long)]
        max_pairs: Option<usize>,
    },
}

fn parse_detectors(spec: &str) -> Result<BTreeSet<DetectorKind>> {
    let mut out = BTreeSet::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        out.insert(
            DetectorKind::parse(name).ok_or_else(|| anyhow!("unknown detector `{name}`"))?,
        );
    }
    if out.is_empty() {
        return Err(anyhow!("empty detector list"));
    }
    Ok(out)
}

fn parse_variant(name: &str) -> Result<Variant> {
    Variant::parse(name).ok_or_else(|| {
        anyhow!(
            "unknown variant `{name}` (case_sensitive, case_insensitive, english_word_extraction)"
        )
    })
}

fn parse_scheme(name: &str) -> Result<Scheme> {
    match name {
        "char_histogram" => Ok(Scheme::CharHistogram),
        "tfidf" => Ok(Scheme::Tfidf),
        "count_frequency" => Ok(Scheme::CountFrequency),
        "char_ngram" => Ok(Scheme::CharNgram),
        _ => Err(anyhow!(
            "unknown scheme `{name}` (char_histogram, tfidf, count_frequency, char_ngram)"
        )),
    }
}

fn apply_env_override(config: &mut ScanConfig) -> Result<()> {
    if let Ok(path) = std::env::var("SECRETSIEVE_CONFIG") {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading SECRETSIEVE_CONFIG file {path}"))?;
        ConfigOverride::from_json(&text)?.apply(config)?;
    }
    Ok(())
}

fn load_dictionary(path: &Option<PathBuf>) -> Result<secretsieve::three_layer::Dictionary> {
    Ok(match path {
        Some(p) => secretsieve::three_layer::Dictionary::from_text(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        ),
        None => secretsieve::three_layer::Dictionary::default_dictionary(),
    })
}

fn run() -> Result<i32> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    match cli.command {
        Command::Scan {
            corpus,
            rules,
            sigs,
            dict,
            detectors,
            intrinsic_model,
            context_model,
            group_model,
            mask: _,
            unmask,
            acknowledge_sensitive,
            format,
            jobs,
            dump_occurrences,
        } => {
            if unmask && !acknowledge_sensitive {
                return Err(anyhow!(
                    "--unmask prints live secrets; pass --acknowledge-sensitive to confirm"
                ));
            }
            let mut config = ScanConfig {
                rules_path: rules,
                signatures_path: sigs,
                dictionary_path: dict,
                intrinsic_model_path: intrinsic_model,
                context_model_path: context_model,
                group_model_path: group_model,
                mask: !unmask,
                jobs,
                ..Default::default()
            };
            if let Some(spec) = &detectors {
                config.detectors = parse_detectors(spec)?;
            }
            apply_env_override(&mut config)?;
            let format = ReportFormat::parse(&format)?;

            let report = match engine::scan(&corpus, &config) {
                Ok(r) => r,
                Err(ScanError::CorpusUnreadable { path, msg }) => {
                    eprintln!("error: corpus unreadable at {}: {msg}", path.display());
                    return Ok(2);
                }
                Err(ScanError::Config(e)) => return Err(e.into()),
            };

            if let Some(path) = dump_occurrences {
                let apps = match engine::load_corpus_dir(&corpus) {
                    Ok(a) => a,
                    Err(e) => return Err(anyhow!("{e}")),
                };
                let mut occurrences = Vec::new();
                for app in &apps {
                    if let Ok(parsed) = secretsieve::ir::parse_app(&app.app_id, &app.files) {
                        occurrences.extend(extract::extract_occurrences(&parsed));
                    }
                }
                let csv = extract::occurrences_to_csv(&occurrences)?;
                std::fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?;
            }

            let bytes = emit_report(&report, format, config.mask)?;
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
            Ok(0)
        }
        Command::Train {
            dataset,
            model_kind,
            scheme,
            variant,
            seed,
            out,
            dict,
        } => {
            let kind = ModelKind::parse(&model_kind)
                .ok_or_else(|| anyhow!("unknown model kind `{model_kind}`"))?;
            let scheme = parse_scheme(&scheme)?;
            let variant = parse_variant(&variant)?;
            let dictionary = load_dictionary(&dict)?;
            let text = std::fs::read_to_string(&dataset)
                .with_context(|| format!("reading {}", dataset.display()))?;
            let data = learned::load_dataset_jsonl(&text, variant)?;
            let (model, metrics) = learned::fit(&data, kind, scheme, seed, &dictionary)?;
            std::fs::write(&out, model.to_json())
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&metrics).expect("metrics serialize")
            );
            Ok(0)
        }
        Command::Eval {
            corpus,
            manifest,
            detectors,
            intrinsic_model,
            context_model,
            group_model,
            jobs,
        } => {
            let mut config = ScanConfig {
                intrinsic_model_path: intrinsic_model,
                context_model_path: context_model,
                group_model_path: group_model,
                jobs,
                ..Default::default()
            };
            if let Some(spec) = &detectors {
                config.detectors = parse_detectors(spec)?;
            }
            apply_env_override(&mut config)?;
            let report = match engine::scan(&corpus, &config) {
                Ok(r) => r,
                Err(ScanError::CorpusUnreadable { path, msg }) => {
                    eprintln!("error: corpus unreadable at {}: {msg}", path.display());
                    return Ok(2);
                }
                Err(ScanError::Config(e)) => return Err(e.into()),
            };
            let text = std::fs::read_to_string(&manifest)
                .with_context(|| format!("reading {}", manifest.display()))?;
            let truth = corpus::manifest_from_jsonl(&text, 0)?;
            let scored = corpus::score(&report.findings, &truth);
            println!(
                "{}",
                serde_json::to_string_pretty(&scored).expect("score serializes")
            );
            Ok(0)
        }
        Command::GenCorpus {
            spec,
            out,
            seed,
            emit_datasets,
        } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let spec: GenSpec = serde_json::from_str(&text)?;
            let generated = corpus::gen_corpus(&spec, &default_signatures(), seed)?;
            corpus::write_corpus(&generated, &out)
                .with_context(|| format!("writing corpus under {}", out.display()))?;
            if emit_datasets {
                let groups = corpus::labeled_groups(&generated, 2, Variant::CaseSensitive);
                let strings =
                    corpus::labeled_strings(&generated, 10_000, Variant::CaseSensitive);
                let windows = corpus::labeled_windows(
                    &generated,
                    engine::CONTEXT_WINDOW_RADIUS,
                    Variant::CaseSensitive,
                );
                std::fs::write(
                    out.join("dataset_groups.jsonl"),
                    learned::dataset_to_jsonl(&groups),
                )?;
                std::fs::write(
                    out.join("dataset_strings.jsonl"),
                    learned::dataset_to_jsonl(&strings),
                )?;
                std::fs::write(
                    out.join("dataset_windows.jsonl"),
                    learned::dataset_to_jsonl(&windows),
                )?;
            }
            println!(
                "wrote {} apps, {} seeded secrets to {}",
                generated.apps.len(),
                generated.manifest.entries.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Study {
            secret,
            nosecret,
            variant,
            max_pairs,
        } => {
            let variant = parse_variant(&variant)?;
            let load = |path: &PathBuf| -> Result<Vec<extract::StringGroup>> {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(learned::load_dataset_jsonl(&text, variant)?
                    .entries
                    .into_iter()
                    .map(|(g, _)| g)
                    .collect())
            };
            let secret_groups = load(&secret)?;
            let nosecret_groups = load(&nosecret)?;
            let dictionary = load_dictionary(&None)?;
            let report = learned::separability_study(
                &secret_groups,
                &nosecret_groups,
                variant,
                &dictionary,
                max_pairs,
            );
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("study serializes")
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
