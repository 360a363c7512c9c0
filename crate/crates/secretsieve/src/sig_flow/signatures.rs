//! Cloud-API signature catalog and call-site matching.
//!
//! Exact mode requires the fully qualified owner, method name, and parameter
//! types to line up. Structural mode encodes the package-structure
//! heuristic: method name and parameter types must be equal and the owner
//! must share a dotted suffix of at least one segment with the catalog
//! entry; anything short of a full owner match is flagged `fuzzy` so the
//! known false-match mode stays visible in reports.

use crate::ir::{self, CalleeSig, IrApp, MethodRef};
use serde::{Deserialize, Serialize};

/// Embedded default catalog: 48 cloud APIs across 10 providers.
pub const DEFAULT_SIGNATURES_JSON: &str = include_str!("../../data/signatures.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    Exact,
    Structural,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiSignature {
    pub provider: String,
    /// Dotted owner path. May start with `*.` to match any owner sharing
    /// the remaining suffix.
    pub owner: String,
    pub method: String,
    pub params: Vec<String>,
    /// 0-based indices of the parameters that carry secrets.
    pub secret_params: Vec<usize>,
    pub match_mode: MatchMode,
}

#[derive(Debug, thiserror::Error)]
pub enum SignatureError {
    #[error("signature file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("signature {provider}.{method}: secret param index {index} out of arity {arity}")]
    SecretIndexOutOfArity {
        provider: String,
        method: String,
        index: usize,
        arity: usize,
    },
}

pub fn load_signatures(json: &str) -> Result<Vec<ApiSignature>, SignatureError> {
    let sigs: Vec<ApiSignature> = serde_json::from_str(json)?;
    for sig in &sigs {
        for &index in &sig.secret_params {
            if index >= sig.params.len() {
                return Err(SignatureError::SecretIndexOutOfArity {
                    provider: sig.provider.clone(),
                    method: sig.method.clone(),
                    index,
                    arity: sig.params.len(),
                });
            }
        }
    }
    Ok(sigs)
}

pub fn default_signatures() -> Vec<ApiSignature> {
    load_signatures(DEFAULT_SIGNATURES_JSON).expect("embedded signature catalog must parse")
}

/// A call site matched against a catalog entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatch {
    pub method: MethodRef,
    pub statement_index: usize,
    pub signature_index: usize,
    /// Structural match whose owner differed from the catalog owner.
    pub fuzzy: bool,
}

fn owner_matches_exact(pattern: &str, owner: &str) -> bool {
    match pattern.strip_prefix("*.") {
        Some(suffix) => {
            owner == suffix || owner.ends_with(&format!(".{suffix}"))
        }
        None => pattern == owner,
    }
}

/// Shared dotted suffix of at least one segment.
fn owner_suffix_overlap(a: &str, b: &str) -> bool {
    let a_last = a.rsplit('.').next().unwrap_or(a);
    let b_last = b.rsplit('.').next().unwrap_or(b);
    a_last == b_last && !a_last.is_empty()
}

fn callee_matches(sig: &ApiSignature, callee: &CalleeSig) -> Option<bool> {
    if callee.name != sig.method {
        return None;
    }
    let params = callee.param_types.as_ref()?;
    if params != &sig.params {
        return None;
    }
    let owner = callee.owner.as_ref()?;
    match sig.match_mode {
        MatchMode::Exact => owner_matches_exact(&sig.owner, owner).then_some(false),
        MatchMode::Structural => {
            if owner_matches_exact(&sig.owner, owner) {
                Some(false)
            } else if owner_suffix_overlap(&sig.owner, owner) {
                Some(true)
            } else {
                None
            }
        }
    }
}

/// Every call site matching any signature, in deterministic
/// (class, method, statement) order.
pub fn match_signatures(app: &IrApp, sigs: &[ApiSignature]) -> Vec<SignatureMatch> {
    let mut out = Vec::new();
    let sites = ir::find_callsites(app, |_| true);
    for (method, statement_index) in sites {
        let class = app
            .find_method(&method.class, &method.name, &method.param_types)
            .expect("call site method must exist");
        let call = class.body[statement_index]
            .call()
            .expect("call site statement must carry a call");
        for (signature_index, sig) in sigs.iter().enumerate() {
            if let Some(fuzzy) = callee_matches(sig, &call.callee) {
                out.push(SignatureMatch {
                    method: method.clone(),
                    statement_index,
                    signature_index,
                    fuzzy,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_app;

    fn azure_parse_sig() -> ApiSignature {
        ApiSignature {
            provider: "microsoft".into(),
            owner: "com.microsoft.azure.storage.CloudStorageAccount".into(),
            method: "parse".into(),
            params: vec!["java.lang.String".into()],
            secret_params: vec![0],
            match_mode: MatchMode::Exact,
        }
    }

    fn twitter_structural_sig() -> ApiSignature {
        ApiSignature {
            provider: "twitter".into(),
            owner: "twitter4j.conf.ConfigurationBuilder".into(),
            method: "setOAuthConsumerKey".into(),
            params: vec!["java.lang.String".into()],
            secret_params: vec![0],
            match_mode: MatchMode::Structural,
        }
    }

    #[test]
    fn exact_signature_matches_azure_parse_call() {
        let app = parse_app(
            "app",
            &[(
                "a.jir".into(),
                "class a.B\nmethod void m() {\n  $acc = staticinvoke <com.microsoft.azure.storage.CloudStorageAccount: com.microsoft.azure.storage.CloudStorageAccount parse(java.lang.String)>(\"DefaultEndpoints\")\n}\n".into(),
            )],
        )
        .unwrap();
        let matches = match_signatures(&app, &[azure_parse_sig()]);
        assert_eq!(matches.len(), 1);
        assert!(!matches[0].fuzzy);
    }

    #[test]
    fn structural_match_on_lookalike_package_is_flagged_fuzzy() {
        let app = parse_app(
            "app",
            &[(
                "a.jir".into(),
                "class a.B\nmethod void m() {\n  virtualinvoke $c.<com.lookalike.oauth.ConfigurationBuilder: com.lookalike.oauth.ConfigurationBuilder setOAuthConsumerKey(java.lang.String)>(\"k\")\n}\n".into(),
            )],
        )
        .unwrap();
        let matches = match_signatures(&app, &[twitter_structural_sig()]);
        assert_eq!(matches.len(), 1);
        assert!(matches[0].fuzzy);
    }

    #[test]
    fn no_signatures_means_no_matches() {
        let app = parse_app(
            "app",
            &[(
                "a.jir".into(),
                "class a.B\nmethod void m() {\n  r0.go(\"x\")\n}\n".into(),
            )],
        )
        .unwrap();
        assert!(match_signatures(&app, &[]).is_empty());
    }

    #[test]
    fn exact_mode_rejects_different_owner() {
        let app = parse_app(
            "app",
            &[(
                "a.jir".into(),
                "class a.B\nmethod void m() {\n  $x = staticinvoke <evil.CloudStorageAccount: evil.CloudStorageAccount parse(java.lang.String)>(\"k\")\n}\n".into(),
            )],
        )
        .unwrap();
        assert!(match_signatures(&app, &[azure_parse_sig()]).is_empty());
    }

    #[test]
    fn default_catalog_loads_48_signatures_over_10_providers() {
        let sigs = default_signatures();
        assert_eq!(sigs.len(), 48);
        let providers: std::collections::BTreeSet<&str> =
            sigs.iter().map(|s| s.provider.as_str()).collect();
        assert_eq!(providers.len(), 10);
    }
}
