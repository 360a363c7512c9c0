//! Signature-driven detector: match cloud-API call sites, then reconstruct
//! the secret argument by inter-procedural backward constant propagation.
//!
//! Resolved values become findings carrying the full slice trace; partial
//! and unresolved slices are reported as diagnostics, not findings.

pub mod signatures;
mod slice;

pub use signatures::{
    default_signatures, load_signatures, match_signatures, ApiSignature, MatchMode, SignatureError,
    SignatureMatch, DEFAULT_SIGNATURES_JSON,
};
pub use slice::{
    backward_slice, EnvConfig, EnvGetter, SliceBudget, SliceResult, SliceStatus, UnresolvedReason,
};

use crate::finding::{DetectorKind, Location, SecretFinding};
use crate::ir::IrApp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A call site whose secret argument could not be fully reconstructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDiagnostic {
    pub app_id: String,
    pub provider: String,
    pub location: Location,
    pub param_index: usize,
    pub status: SliceStatus,
    pub fuzzy: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SigFlowOutput {
    pub findings: Vec<SecretFinding>,
    pub diagnostics: Vec<SliceDiagnostic>,
}

/// Runs the detector end to end over one app.
pub fn run_sig_flow(
    app: &IrApp,
    sigs: &[ApiSignature],
    budget: &SliceBudget,
    env: &EnvConfig,
) -> SigFlowOutput {
    let mut merged: BTreeMap<(String, String), SecretFinding> = BTreeMap::new();
    let mut diagnostics = Vec::new();

    for m in match_signatures(app, sigs) {
        let sig = &sigs[m.signature_index];
        let location = Location {
            class: m.method.class.clone(),
            method: Some(format!(
                "{}({})",
                m.method.name,
                m.method.param_types.join(",")
            )),
            statement_index: Some(m.statement_index),
        };
        for &param in &sig.secret_params {
            let results = backward_slice(app, &m.method, m.statement_index, param, budget, env);
            for result in results {
                match &result.status {
                    SliceStatus::Resolved(value) if !value.is_empty() => {
                        let key = (value.clone(), sig.provider.clone());
                        merged
                            .entry(key)
                            .and_modify(|f| {
                                f.multiplicity += 1;
                                f.locations.push(location.clone());
                                f.fuzzy_match |= m.fuzzy;
                            })
                            .or_insert_with(|| {
                                let mut finding = SecretFinding::new(
                                    &app.app_id,
                                    value,
                                    &sig.provider,
                                    DetectorKind::SigFlow,
                                );
                                finding.locations.push(location.clone());
                                finding.slice_trace = Some(result.trace.clone());
                                finding.fuzzy_match = m.fuzzy;
                                finding
                                    .confidence
                                    .insert(DetectorKind::SigFlow, if m.fuzzy { 0.7 } else { 1.0 });
                                finding
                            });
                    }
                    _ => diagnostics.push(SliceDiagnostic {
                        app_id: app.app_id.clone(),
                        provider: sig.provider.clone(),
                        location: location.clone(),
                        param_index: param,
                        status: result.status.clone(),
                        fuzzy: m.fuzzy,
                    }),
                }
            }
        }
    }

    SigFlowOutput {
        findings: merged.into_values().collect(),
        diagnostics,
    }
}
