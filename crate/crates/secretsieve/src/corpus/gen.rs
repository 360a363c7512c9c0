//! Deterministic synthetic corpus generation with a ground-truth manifest.
//!
//! Every seeded secret is placed through one of six statement templates
//! (direct literal argument, split builder/concat assembly, static field,
//! array assembly, env-file lookup, unused literal). Placements that reach
//! a cloud API may additionally be wrapped in one or two call levels so the
//! slicer's inter-procedural paths are exercised. Noise methods carry
//! ordinary vocabulary strings and loose-regex-shaped random distractors.
//!
//! Generation is deterministic: one RNG stream per app index, derived from
//! the corpus seed.

use crate::ir::{parse_app, IrApp};
use crate::sig_flow::{ApiSignature, MatchMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const NOISE_SECRET_TERMS: &str = include_str!("../../data/noise_secret_terms.txt");
pub const NOISE_GENERIC_TERMS: &str = include_str!("../../data/noise_generic_terms.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    LiteralArg,
    SplitBuilder,
    StaticField,
    ArrayAssembly,
    EnvFile,
    UnusedLiteral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedSpec {
    pub provider: String,
    pub placement: Placement,
    /// Generator pattern: literals plus classes like `[0-9A-Za-z\-_]{35}`
    /// with optional `{m,n}` length ranges.
    pub key_format: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseProfile {
    /// Ordinary vocabulary strings per noise method.
    pub strings_per_method: (usize, usize),
    /// Noise methods per app.
    pub methods_per_app: usize,
    /// Loose-rule-shaped random alphanumeric distractors per app.
    pub distractors_per_app: usize,
    /// Secret-context vocabulary strings placed next to each seed.
    pub context_terms_per_seed: (usize, usize),
}

impl Default for NoiseProfile {
    fn default() -> Self {
        NoiseProfile {
            strings_per_method: (2, 6),
            methods_per_app: 4,
            distractors_per_app: 0,
            context_terms_per_seed: (3, 8),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_apps: usize,
    pub seeds: Vec<SeedSpec>,
    #[serde(default)]
    pub noise: NoiseProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub app_id: String,
    pub value: String,
    pub provider: String,
    pub placement: Placement,
    pub class: String,
    pub method: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthManifest {
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    pub apps: Vec<IrApp>,
    /// Per-app env maps, written as `corpus/<app_id>/env.json`.
    pub env_files: BTreeMap<String, BTreeMap<String, String>>,
    pub manifest: GroundTruthManifest,
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error("generated class failed to parse back: {0}")]
    SelfCheck(String),
}

/// Picks, per provider, a catalog signature with exactly one secret
/// parameter for seeded API calls.
fn provider_api(sigs: &[ApiSignature], provider: &str) -> Option<ApiSignature> {
    sigs.iter()
        .find(|s| {
            s.provider == provider
                && s.secret_params.len() == 1
                && s.match_mode == MatchMode::Exact
        })
        .cloned()
}

struct KeyPattern {
    atoms: Vec<Atom>,
}

enum Atom {
    Lit(char),
    Class { chars: Vec<char>, min: usize, max: usize },
}

impl KeyPattern {
    fn parse(src: &str) -> Result<KeyPattern, GenError> {
        let err = |msg: &str| GenError::InvalidSpec(format!("key_format `{src}`: {msg}"));
        let mut atoms = Vec::new();
        let mut chars = src.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '\\' => {
                    let next = chars.next().ok_or_else(|| err("dangling escape"))?;
                    atoms.push(Atom::Lit(next));
                }
                '[' => {
                    let mut class = Vec::new();
                    loop {
                        let c = chars.next().ok_or_else(|| err("unterminated class"))?;
                        match c {
                            ']' => break,
                            '\\' => {
                                class.push(chars.next().ok_or_else(|| err("dangling escape"))?)
                            }
                            _ => {
                                if chars.peek() == Some(&'-') {
                                    chars.next();
                                    let hi =
                                        chars.next().ok_or_else(|| err("unterminated range"))?;
                                    if hi == ']' {
                                        class.push(c);
                                        class.push('-');
                                        break;
                                    }
                                    if (hi as u32) < (c as u32) {
                                        return Err(err("descending range"));
                                    }
                                    for cp in (c as u32)..=(hi as u32) {
                                        class.push(char::from_u32(cp).unwrap());
                                    }
                                } else {
                                    class.push(c);
                                }
                            }
                        }
                    }
                    let (min, max) = if chars.peek() == Some(&'{') {
                        chars.next();
                        let mut digits = String::new();
                        let mut second = None;
                        loop {
                            let c = chars.next().ok_or_else(|| err("unterminated repeat"))?;
                            match c {
                                '}' => break,
                                ',' => second = Some(String::new()),
                                d if d.is_ascii_digit() => match &mut second {
                                    Some(s) => s.push(d),
                                    None => digits.push(d),
                                },
                                _ => return Err(err("bad repeat")),
                            }
                        }
                        let min: usize =
                            digits.parse().map_err(|_| err("bad repeat count"))?;
                        let max = match second {
                            Some(s) => s.parse().map_err(|_| err("bad repeat count"))?,
                            None => min,
                        };
                        (min, max)
                    } else {
                        (1, 1)
                    };
                    if class.is_empty() || max < min {
                        return Err(err("empty class or inverted range"));
                    }
                    atoms.push(Atom::Class { chars: class, min, max });
                }
                _ => atoms.push(Atom::Lit(c)),
            }
        }
        if atoms.is_empty() {
            return Err(err("empty pattern"));
        }
        Ok(KeyPattern { atoms })
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> String {
        let mut out = String::new();
        for atom in &self.atoms {
            match atom {
                Atom::Lit(c) => out.push(*c),
                Atom::Class { chars, min, max } => {
                    let n = if min == max {
                        *min
                    } else {
                        rng.gen_range(*min..=*max)
                    };
                    for _ in 0..n {
                        out.push(chars[rng.gen_range(0..chars.len())]);
                    }
                }
            }
        }
        out
    }
}

struct Vocab {
    secret_terms: Vec<String>,
    generic_terms: Vec<String>,
}

impl Vocab {
    fn bundled() -> Vocab {
        let load = |text: &str| {
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect()
        };
        Vocab {
            secret_terms: load(NOISE_SECRET_TERMS),
            generic_terms: load(NOISE_GENERIC_TERMS),
        }
    }

    fn secret_term(&self, rng: &mut ChaCha8Rng) -> &str {
        &self.secret_terms[rng.gen_range(0..self.secret_terms.len())]
    }

    fn generic_term(&self, rng: &mut ChaCha8Rng) -> &str {
        &self.generic_terms[rng.gen_range(0..self.generic_terms.len())]
    }
}

const ALNUM: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn random_alnum(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| ALNUM[rng.gen_range(0..ALNUM.len())] as char)
        .collect()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

/// One seed instance assigned to an app.
struct SeedInstance {
    provider: String,
    placement: Placement,
    pattern: KeyPattern,
}

/// Generates the corpus for `spec` deterministically under `seed`.
/// Every produced file re-parses; string constants are byte-identical to
/// the manifest values.
pub fn gen_corpus(
    spec: &GenSpec,
    sigs: &[ApiSignature],
    seed: u64,
) -> Result<GeneratedCorpus, GenError> {
    if spec.n_apps == 0 {
        return Err(GenError::InvalidSpec("n_apps must be positive".into()));
    }
    let vocab = Vocab::bundled();

    // Round-robin assignment of seed instances to apps.
    let mut per_app: Vec<Vec<SeedInstance>> = (0..spec.n_apps).map(|_| Vec::new()).collect();
    let mut cursor = 0usize;
    for s in &spec.seeds {
        if s.placement != Placement::UnusedLiteral && provider_api(sigs, &s.provider).is_none() {
            return Err(GenError::InvalidSpec(format!(
                "no single-secret exact signature for provider `{}`",
                s.provider
            )));
        }
        for _ in 0..s.count {
            per_app[cursor % spec.n_apps].push(SeedInstance {
                provider: s.provider.clone(),
                placement: s.placement,
                pattern: KeyPattern::parse(&s.key_format)?,
            });
            cursor += 1;
        }
    }

    let mut apps = Vec::with_capacity(spec.n_apps);
    let mut env_files = BTreeMap::new();
    let mut entries = Vec::new();

    for (app_idx, seeds) in per_app.iter().enumerate() {
        let app_id = format!("app_{app_idx:04}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(app_idx as u64 + 1);

        let mut files: Vec<(String, String)> = Vec::new();
        let mut env: BTreeMap<String, String> = BTreeMap::new();

        for (k, inst) in seeds.iter().enumerate() {
            let class_name = format!("g{app_idx}.S{k}");
            let key = inst.pattern.generate(&mut rng);
            let (text, method, index) = render_seed_class(
                &class_name,
                inst,
                &key,
                sigs,
                &vocab,
                &mut rng,
                spec.noise.context_terms_per_seed,
                &mut env,
                k,
            );
            files.push((format!("{class_name}.jir"), text));
            entries.push(ManifestEntry {
                app_id: app_id.clone(),
                value: key,
                provider: inst.provider.clone(),
                placement: inst.placement,
                class: class_name,
                method,
                index,
            });
        }

        // Noise classes: ordinary strings, distractors, plain statements.
        let noise_class = format!("g{app_idx}.N0");
        let mut text = format!("class {noise_class}\n");
        for m in 0..spec.noise.methods_per_app {
            writeln!(text, "method void n{m}() {{").unwrap();
            let (lo, hi) = spec.noise.strings_per_method;
            let n_strings = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            let mut reg = 0usize;
            for _ in 0..n_strings {
                writeln!(text, "  $v{reg} = \"{}\"", escape(vocab.generic_term(&mut rng))).unwrap();
                reg += 1;
            }
            // A few stringless statements so some windows carry no literals.
            for _ in 0..rng.gen_range(1..4) {
                writeln!(text, "  $v{} = $v{}", reg + 1, reg).unwrap();
                reg += 1;
            }
            writeln!(text, "  return").unwrap();
            writeln!(text, "}}").unwrap();
        }
        if spec.noise.distractors_per_app > 0 {
            writeln!(text, "method void d0() {{").unwrap();
            for i in 0..spec.noise.distractors_per_app {
                let distractor = if rng.gen_bool(0.5) {
                    random_alnum(&mut rng, 18, 25)
                } else {
                    random_alnum(&mut rng, 40, 50)
                };
                writeln!(text, "  $d{i} = \"{}\"", escape(&distractor)).unwrap();
            }
            writeln!(text, "  return").unwrap();
            writeln!(text, "}}").unwrap();
        }
        files.push((format!("{noise_class}.jir"), text));

        let app = parse_app(&app_id, &files).map_err(|e| GenError::SelfCheck(e.to_string()))?;
        apps.push(app);
        if !env.is_empty() {
            env_files.insert(app_id, env);
        }
    }

    Ok(GeneratedCorpus {
        apps,
        env_files,
        manifest: GroundTruthManifest { seed, entries },
    })
}

/// Renders one seeded class; returns (text, method display, statement index
/// of the manifest location).
#[allow(clippy::too_many_arguments)]
fn render_seed_class(
    class_name: &str,
    inst: &SeedInstance,
    key: &str,
    sigs: &[ApiSignature],
    vocab: &Vocab,
    rng: &mut ChaCha8Rng,
    context_range: (usize, usize),
    env: &mut BTreeMap<String, String>,
    seed_idx: usize,
) -> (String, String, usize) {
    let mut text = format!("class {class_name}\n");
    let mut body: Vec<String> = Vec::new();

    // Secret-context vocabulary near the seed (OAuth-flavored groups).
    let (lo, hi) = context_range;
    let n_ctx = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    for reg in 0..n_ctx {
        body.push(format!("  $c{reg} = \"{}\"", escape(vocab.secret_term(rng))));
    }

    // The expression that carries the key at the API call site, built per
    // placement.
    let mut static_field_line = String::new();
    let key_local = match inst.placement {
        Placement::LiteralArg | Placement::UnusedLiteral => {
            body.push(format!("  $k = \"{}\"", escape(key)));
            "$k".to_string()
        }
        Placement::SplitBuilder => {
            let cut = 1 + rng.gen_range(0..key.len().max(2) - 1);
            let (a, b) = key.split_at(cut);
            if rng.gen_bool(0.5) {
                body.push("  specialinvoke $b.<java.lang.StringBuilder: void <init>()>()".into());
                body.push(format!(
                    "  virtualinvoke $b.<java.lang.StringBuilder: java.lang.StringBuilder append(java.lang.String)>(\"{}\")",
                    escape(a)
                ));
                body.push(format!(
                    "  virtualinvoke $b.<java.lang.StringBuilder: java.lang.StringBuilder append(java.lang.String)>(\"{}\")",
                    escape(b)
                ));
                body.push(
                    "  $k = virtualinvoke $b.<java.lang.StringBuilder: java.lang.String toString()>()"
                        .into(),
                );
            } else {
                body.push(format!("  $f = \"{}\"", escape(a)));
                body.push(format!(
                    "  $k = virtualinvoke $f.<java.lang.String: java.lang.String concat(java.lang.String)>(\"{}\")",
                    escape(b)
                ));
            }
            "$k".to_string()
        }
        Placement::StaticField => {
            static_field_line = format!(
                "staticfield java.lang.String KEY{seed_idx} = \"{}\"\n",
                escape(key)
            );
            body.push(format!(
                "  $k = <{class_name}: java.lang.String KEY{seed_idx}>"
            ));
            "$k".to_string()
        }
        Placement::ArrayAssembly => {
            let len = rng.gen_range(2..5usize);
            let slot = rng.gen_range(0..len);
            body.push(format!("  $a = newarray (java.lang.String)[{len}]"));
            for i in 0..len {
                if i == slot {
                    body.push(format!("  $a[{i}] = \"{}\"", escape(key)));
                } else {
                    body.push(format!(
                        "  $a[{i}] = \"{}\"",
                        escape(vocab.generic_term(rng))
                    ));
                }
            }
            body.push(format!("  $k = $a[{slot}]"));
            "$k".to_string()
        }
        Placement::EnvFile => {
            let env_key = format!("cfg.key{seed_idx}");
            env.insert(env_key.clone(), key.to_string());
            body.push(format!(
                "  $k = staticinvoke <java.lang.System: java.lang.String getProperty(java.lang.String)>(\"{env_key}\")"
            ));
            "$k".to_string()
        }
    };

    if inst.placement == Placement::UnusedLiteral {
        body.push("  return".into());
        writeln!(text, "method void m0() {{").unwrap();
        for line in &body {
            text.push_str(line);
            text.push('\n');
        }
        writeln!(text, "}}").unwrap();
        // Manifest points at the literal assignment.
        let index = body.len() - 2;
        return (text, "m0()".to_string(), index);
    }

    let api = provider_api(sigs, &inst.provider).expect("validated in gen_corpus");
    let secret_at = api.secret_params[0];
    let args: Vec<String> = api
        .params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == secret_at {
                key_local.clone()
            } else if p == "java.lang.String" {
                format!("\"{}\"", escape(vocab.generic_term(rng)))
            } else {
                "$ctx".to_string()
            }
        })
        .collect();
    let sig = format!(
        "<{}: {} {}({})>",
        api.owner,
        if api.method == "<init>" { "void" } else { &api.owner },
        api.method,
        api.params.join(",")
    );
    let call = if api.method == "<init>" {
        format!("  specialinvoke $api.{sig}({})", args.join(", "))
    } else {
        format!("  virtualinvoke $api.{sig}({})", args.join(", "))
    };

    // Optional one- or two-level wrapping around the API call.
    let depth = match inst.placement {
        Placement::LiteralArg | Placement::SplitBuilder => rng.gen_range(0..3usize),
        _ => 0,
    };
    text.push_str(&static_field_line);
    if depth == 0 {
        body.push(call);
        writeln!(text, "method void m0() {{").unwrap();
        for line in &body {
            text.push_str(line);
            text.push('\n');
        }
        writeln!(text, "}}").unwrap();
        let index = body.len() - 1;
        (text, "m0()".to_string(), index)
    } else {
        // m0 computes the key and passes it down wrappers w1[..w2]; the
        // API call sits in the deepest wrapper.
        let deepest = format!("w{depth}");
        body.push(format!(
            "  staticinvoke <{class_name}: void w1(java.lang.String)>({key_local})"
        ));
        writeln!(text, "method void m0() {{").unwrap();
        for line in &body {
            text.push_str(line);
            text.push('\n');
        }
        writeln!(text, "}}").unwrap();
        for level in 1..=depth {
            writeln!(text, "method void w{level}(java.lang.String) {{").unwrap();
            if level == depth {
                let wrapped_call = call.replace(&key_local, "p0");
                text.push_str(&wrapped_call);
                text.push('\n');
            } else {
                writeln!(
                    text,
                    "  staticinvoke <{class_name}: void w{}(java.lang.String)>(p0)",
                    level + 1
                )
                .unwrap();
            }
            writeln!(text, "}}").unwrap();
        }
        (text, format!("{deepest}(java.lang.String)"), 0)
    }
}

pub fn manifest_to_jsonl(manifest: &GroundTruthManifest) -> String {
    let mut out = String::new();
    for e in &manifest.entries {
        out.push_str(&serde_json::to_string(e).expect("manifest entry serializes"));
        out.push('\n');
    }
    out
}

pub fn manifest_from_jsonl(text: &str, seed: u64) -> Result<GroundTruthManifest, serde_json::Error> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(line)?);
    }
    Ok(GroundTruthManifest { seed, entries })
}

/// Writes `corpus/<app_id>/*.jir`, per-app `env.json`, and `manifest.jsonl`
/// under `dir`.
pub fn write_corpus(corpus: &GeneratedCorpus, dir: &std::path::Path) -> std::io::Result<()> {
    for app in &corpus.apps {
        let app_dir = dir.join(&app.app_id);
        std::fs::create_dir_all(&app_dir)?;
        for (path, text) in app.render_files() {
            std::fs::write(app_dir.join(path), text)?;
        }
        if let Some(env) = corpus.env_files.get(&app.app_id) {
            std::fs::write(
                app_dir.join("env.json"),
                serde_json::to_string_pretty(env).expect("env map serializes"),
            )?;
        }
    }
    std::fs::write(dir.join("manifest.jsonl"), manifest_to_jsonl(&corpus.manifest))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig_flow::default_signatures;

    pub(crate) fn google_seed(placement: Placement, count: usize) -> SeedSpec {
        SeedSpec {
            provider: "google".into(),
            placement,
            key_format: r"AIza[0-9A-Za-z\-_]{35}".into(),
            count,
        }
    }

    #[test]
    fn key_pattern_generates_matching_strings() {
        let pat = KeyPattern::parse(r"AIza[0-9A-Za-z\-_]{35}").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let oracle = regex::Regex::new(r"^AIza[0-9A-Za-z\-_]{35}$").unwrap();
        for _ in 0..50 {
            let key = pat.generate(&mut rng);
            assert!(oracle.is_match(&key), "{key}");
        }
    }

    #[test]
    fn key_pattern_length_ranges() {
        let pat = KeyPattern::parse("[0-9a-zA-Z]{18,25}").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = pat.generate(&mut rng);
            assert!((18..=25).contains(&s.len()), "{s}");
        }
    }

    #[test]
    fn minimal_literal_corpus_has_one_manifest_entry_and_api_call() {
        let spec = GenSpec {
            n_apps: 1,
            seeds: vec![google_seed(Placement::LiteralArg, 1)],
            noise: NoiseProfile::default(),
        };
        let corpus = gen_corpus(&spec, &default_signatures(), 7).unwrap();
        assert_eq!(corpus.manifest.entries.len(), 1);
        let app = &corpus.apps[0];
        let sites = crate::sig_flow::match_signatures(app, &default_signatures());
        assert_eq!(sites.len(), 1);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = GenSpec {
            n_apps: 3,
            seeds: vec![
                google_seed(Placement::LiteralArg, 2),
                google_seed(Placement::SplitBuilder, 2),
                google_seed(Placement::ArrayAssembly, 1),
                google_seed(Placement::EnvFile, 1),
            ],
            noise: NoiseProfile::default(),
        };
        let sigs = default_signatures();
        let a = gen_corpus(&spec, &sigs, 42).unwrap();
        let b = gen_corpus(&spec, &sigs, 42).unwrap();
        let files =
            |c: &GeneratedCorpus| -> Vec<_> { c.apps.iter().flat_map(|a| a.render_files()).collect() };
        assert_eq!(files(&a), files(&b));
        assert_eq!(a.manifest, b.manifest);

        let c = gen_corpus(&spec, &sigs, 43).unwrap();
        assert_ne!(files(&a), files(&c));
    }

    #[test]
    fn split_builder_never_leaves_the_whole_key_as_a_literal() {
        let spec = GenSpec {
            n_apps: 2,
            seeds: vec![google_seed(Placement::SplitBuilder, 6)],
            noise: NoiseProfile::default(),
        };
        let corpus = gen_corpus(&spec, &default_signatures(), 11).unwrap();
        for entry in &corpus.manifest.entries {
            let app = corpus
                .apps
                .iter()
                .find(|a| a.app_id == entry.app_id)
                .unwrap();
            for (_, text) in app.render_files() {
                assert!(
                    !text.contains(&entry.value),
                    "full key {} leaked into IR text",
                    entry.value
                );
            }
        }
    }

    #[test]
    fn env_placement_emits_env_map_not_literal() {
        let spec = GenSpec {
            n_apps: 1,
            seeds: vec![google_seed(Placement::EnvFile, 1)],
            noise: NoiseProfile::default(),
        };
        let corpus = gen_corpus(&spec, &default_signatures(), 3).unwrap();
        let entry = &corpus.manifest.entries[0];
        let env = corpus.env_files.get(&entry.app_id).unwrap();
        assert!(env.values().any(|v| v == &entry.value));
        for (_, text) in corpus.apps[0].render_files() {
            assert!(!text.contains(&entry.value));
        }
    }

    #[test]
    fn generated_output_reparses_with_zero_unknown_statements() {
        let spec = GenSpec {
            n_apps: 4,
            seeds: vec![
                google_seed(Placement::LiteralArg, 3),
                google_seed(Placement::SplitBuilder, 3),
                google_seed(Placement::StaticField, 2),
                google_seed(Placement::ArrayAssembly, 2),
                google_seed(Placement::EnvFile, 2),
                google_seed(Placement::UnusedLiteral, 2),
            ],
            noise: NoiseProfile {
                distractors_per_app: 5,
                ..Default::default()
            },
        };
        let corpus = gen_corpus(&spec, &default_signatures(), 99).unwrap();
        for app in &corpus.apps {
            let reparsed = parse_app(&app.app_id, &app.render_files()).unwrap();
            assert_eq!(*app, reparsed);
            for class in &reparsed.classes {
                for method in &class.methods {
                    for stmt in &method.body {
                        assert!(
                            !matches!(
                                stmt.kind,
                                crate::ir::StatementKind::Assign {
                                    rhs: crate::ir::IrExpr::Unknown,
                                    ..
                                }
                            ),
                            "unknown statement in generated {}.{}",
                            class.qualified_name,
                            method.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_provider_is_an_invalid_spec() {
        let spec = GenSpec {
            n_apps: 1,
            seeds: vec![SeedSpec {
                provider: "nonexistent".into(),
                placement: Placement::LiteralArg,
                key_format: "[a-z]{10}".into(),
                count: 1,
            }],
            noise: NoiseProfile::default(),
        };
        assert!(matches!(
            gen_corpus(&spec, &default_signatures(), 0),
            Err(GenError::InvalidSpec(_))
        ));
    }

    #[test]
    fn bad_key_format_is_an_invalid_spec() {
        let spec = GenSpec {
            n_apps: 1,
            seeds: vec![SeedSpec {
                provider: "google".into(),
                placement: Placement::LiteralArg,
                key_format: "[unclosed".into(),
                count: 1,
            }],
            noise: NoiseProfile::default(),
        };
        assert!(matches!(
            gen_corpus(&spec, &default_signatures(), 0),
            Err(GenError::InvalidSpec(_))
        ));
    }

    #[test]
    fn manifest_jsonl_round_trips() {
        let spec = GenSpec {
            n_apps: 2,
            seeds: vec![google_seed(Placement::LiteralArg, 3)],
            noise: NoiseProfile::default(),
        };
        let corpus = gen_corpus(&spec, &default_signatures(), 5).unwrap();
        let jsonl = manifest_to_jsonl(&corpus.manifest);
        let back = manifest_from_jsonl(&jsonl, corpus.manifest.seed).unwrap();
        assert_eq!(back, corpus.manifest);
    }
}
