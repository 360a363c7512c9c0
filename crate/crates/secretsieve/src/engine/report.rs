//! Report emission: versioned JSON, RFC 4180 CSV of the per-provider
//! counts, and a plain text table. Masking (on by default at the CLI)
//! replaces every secret value with its first four characters plus length.

use super::ScanReport;
use crate::finding::mask_value;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl ReportFormat {
    pub fn parse(name: &str) -> Result<ReportFormat, ReportError> {
        match name {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("unknown report format `{0}` (expected json, csv, or table)")]
    UnknownFormat(String),
    #[error("csv serialization failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Returns a copy with every secret-bearing field masked.
pub fn masked_report(report: &ScanReport) -> ScanReport {
    let mut out = report.clone();
    out.masked = true;
    for f in &mut out.findings {
        f.value = mask_value(&f.value);
        if let Some(v) = &mut f.filter_verdict {
            v.candidate = mask_value(&v.candidate);
        }
    }
    for d in &mut out.diagnostics {
        if let crate::sig_flow::SliceStatus::Partial { fragments, .. } = &mut d.status {
            for frag in fragments.iter_mut() {
                *frag = mask_value(frag);
            }
        }
    }
    out
}

/// Serializes the report; `mask` controls whether secret values appear in
/// full. Field ordering is stable across runs.
pub fn emit_report(
    report: &ScanReport,
    format: ReportFormat,
    mask: bool,
) -> Result<Vec<u8>, ReportError> {
    let owned;
    let report = if mask && !report.masked {
        owned = masked_report(report);
        &owned
    } else {
        report
    };
    match format {
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Table => Ok(emit_table(report).into_bytes()),
    }
}

fn detector_columns(report: &ScanReport) -> Vec<crate::finding::DetectorKind> {
    crate::finding::DetectorKind::ALL
        .into_iter()
        .filter(|d| report.per_provider_counts.values().any(|m| m.contains_key(d)))
        .collect()
}

fn emit_csv(report: &ScanReport) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let detectors = detector_columns(report);
    let mut header = vec!["provider".to_string()];
    header.extend(detectors.iter().map(|d| d.to_string()));
    header.push("unique_total".to_string());
    w.write_record(&header)?;
    for (provider, counts) in &report.per_provider_counts {
        let mut row = vec![provider.clone()];
        for d in &detectors {
            row.push(counts.get(d).copied().unwrap_or(0).to_string());
        }
        // Unique values for this provider across all detectors.
        let total = report
            .findings
            .iter()
            .filter(|f| &f.provider == provider)
            .map(|f| f.value.as_str())
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        row.push(total.to_string());
        w.write_record(&row)?;
    }
    Ok(w
        .into_inner()
        .map_err(|e| csv::Error::from(std::io::Error::other(e.to_string())))?)
}

fn emit_table(report: &ScanReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "corpus: {}  apps: {}  failures: {}",
        report.corpus,
        report.apps_scanned,
        report.app_failures.len()
    )
    .unwrap();
    writeln!(out, "findings: {}", report.findings.len()).unwrap();
    out.push('\n');

    let detectors = detector_columns(report);
    let mut width = "provider".len();
    for p in report.per_provider_counts.keys() {
        width = width.max(p.len());
    }
    write!(out, "{:width$}", "provider").unwrap();
    for d in &detectors {
        write!(out, "  {:>14}", d.to_string()).unwrap();
    }
    out.push('\n');
    for (provider, counts) in &report.per_provider_counts {
        write!(out, "{provider:width$}").unwrap();
        for d in &detectors {
            write!(out, "  {:>14}", counts.get(d).copied().unwrap_or(0)).unwrap();
        }
        out.push('\n');
    }
    out.push('\n');
    writeln!(out, "overlap (unique value sets):").unwrap();
    for (cell, n) in &report.overlap {
        writeln!(out, "  {cell}: {n}").unwrap();
    }
    if !report.diagnostics.is_empty() {
        writeln!(out, "\nslice diagnostics: {}", report.diagnostics.len()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{scan_apps, CorpusApp, ScanAssets, ScanConfig};
    use std::collections::BTreeMap;

    fn sample_report() -> ScanReport {
        let key = format!("AIza{}", "aB3xK9mQ2pL7wR5tY8nU4vC6jH0fE1sZqWe");
        let apps = vec![CorpusApp {
            app_id: "app_x".into(),
            files: vec![(
                "a.jir".into(),
                format!("class a.B\nmethod void m() {{\n  $k = \"{key}\"\n}}\n"),
            )],
            env: BTreeMap::new(),
        }];
        let config = ScanConfig::default();
        let assets = ScanAssets::load(&config).unwrap();
        scan_apps(&apps, &config, &assets, "mem")
    }

    #[test]
    fn masked_google_key_keeps_prefix_and_length() {
        let report = sample_report();
        let masked = masked_report(&report);
        assert_eq!(masked.findings[0].value, "AIza…(39)");
        assert!(masked.masked);
    }

    #[test]
    fn json_round_trips_structurally() {
        let report = sample_report();
        let bytes = emit_report(&report, ReportFormat::Json, true).unwrap();
        let back: ScanReport = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, masked_report(&report));
    }

    #[test]
    fn csv_counts_match_json_totals() {
        let report = sample_report();
        let bytes = emit_report(&report, ReportFormat::Csv, true).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("provider,"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("google,"));
        let count: usize = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(
            count,
            report.per_provider_counts["google"]
                [&crate::finding::DetectorKind::ThreeLayer]
        );
    }

    #[test]
    fn unknown_format_is_an_error() {
        assert!(matches!(
            ReportFormat::parse("yaml"),
            Err(ReportError::UnknownFormat(_))
        ));
    }

    #[test]
    fn table_format_renders() {
        let report = sample_report();
        let bytes = emit_report(&report, ReportFormat::Table, true).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("google"));
        assert!(text.contains("overlap"));
    }
}
