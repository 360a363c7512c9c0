//! Scan throughput: rayon data-parallel path vs the sequential fallback.
//!
//! `jobs = 1` forces the always-available sequential path (the same code
//! that runs when the `parallel` feature is disabled); `jobs = N` runs the
//! rayon pool. Pairwise similarity gets the same treatment.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use secretsieve::corpus::{self, GenSpec, NoiseProfile, Placement, SeedSpec};
use secretsieve::engine::{scan_apps, CorpusApp, ScanAssets, ScanConfig};
use secretsieve::learned::{separability_study, Label, Variant};
use secretsieve::sig_flow::default_signatures;
use secretsieve::three_layer::Dictionary;
use std::time::Duration;

fn bench_corpus() -> corpus::GeneratedCorpus {
    let spec = GenSpec {
        n_apps: 24,
        seeds: vec![
            SeedSpec {
                provider: "google".into(),
                placement: Placement::LiteralArg,
                key_format: r"AIza[0-9A-Za-z\-_]{35}".into(),
                count: 12,
            },
            SeedSpec {
                provider: "google".into(),
                placement: Placement::SplitBuilder,
                key_format: r"AIza[0-9A-Za-z\-_]{35}".into(),
                count: 12,
            },
            SeedSpec {
                provider: "microsoft".into(),
                placement: Placement::StaticField,
                key_format: r"[A-Za-z0-9+/]{86}==".into(),
                count: 6,
            },
        ],
        noise: NoiseProfile {
            methods_per_app: 8,
            distractors_per_app: 10,
            ..Default::default()
        },
    };
    corpus::gen_corpus(&spec, &default_signatures(), 2024).unwrap()
}

fn bench_scan(c: &mut Criterion) {
    let corpus = bench_corpus();
    let apps: Vec<CorpusApp> = (&corpus).into();
    let assets = ScanAssets::load(&ScanConfig::default()).unwrap();

    let mut group = c.benchmark_group("scan");
    // jobs = 1 is the sequential path; the second entry exercises the
    // rayon pool even on single-core hosts.
    let parallel_jobs = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
        .max(2);
    for jobs in [1usize, parallel_jobs] {
        group.bench_with_input(BenchmarkId::new("jobs", jobs), &jobs, |b, &jobs| {
            let config = ScanConfig {
                jobs: Some(jobs),
                ..Default::default()
            };
            b.iter(|| scan_apps(&apps, &config, &assets, "bench"));
        });
    }
    group.finish();
}

fn bench_pairwise_similarity(c: &mut Criterion) {
    let corpus = bench_corpus();
    let dict = Dictionary::default_dictionary();
    let data = corpus::labeled_groups(&corpus, 2, Variant::CaseSensitive);
    let secret: Vec<_> = data
        .entries
        .iter()
        .filter(|(_, l)| *l == Label::Secret)
        .map(|(g, _)| g.clone())
        .collect();
    let nosecret: Vec<_> = data
        .entries
        .iter()
        .filter(|(_, l)| *l == Label::NoSecret)
        .map(|(g, _)| g.clone())
        .collect();

    c.bench_function("separability_study", |b| {
        b.iter(|| separability_study(&secret, &nosecret, Variant::CaseSensitive, &dict, None));
    });
}

fn config() -> Criterion {
    Criterion::default()
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3))
        .sample_size(10)
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_scan, bench_pairwise_similarity
}
criterion_main!(benches);
