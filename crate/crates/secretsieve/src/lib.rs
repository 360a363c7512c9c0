//! # secretsieve
//!
//! A multi-strategy engine for detecting checked-in secrets (cloud API keys
//! and credentials) in decompiled Android app code represented as a
//! Jimple-like textual IR.
//!
//! The crate implements four detector families over a common IR model and
//! makes their results comparable on seeded synthetic corpora:
//!
//! - [`three_layer`]: regex candidate extraction followed by entropy, word,
//!   and character-pattern filters.
//! - [`sig_flow`]: cloud-API signature matching plus inter-procedural
//!   backward constant propagation to reconstruct argument values.
//! - [`learned`]: intrinsic-string, context-window, and string-group
//!   classifiers (logistic regression, naive Bayes, linear SVC) over
//!   character and token features, with cosine-similarity statistics.
//! - [`corpus`]: a deterministic synthetic corpus generator with a
//!   ground-truth manifest, a literal-preserving obfuscation pass, and a
//!   scoring harness (precision/recall/overlap).
//!
//! The [`engine`] module ties everything together behind a scan pipeline and
//! is what the `secretsieve` binary drives.
//!
//! With the default `parallel` feature, per-app work is distributed with
//! rayon; disabling the feature falls back to sequential iteration with the
//! same results.

pub mod corpus;
pub mod engine;
pub mod extract;
pub mod finding;
pub mod ir;
pub mod learned;
pub mod sig_flow;
pub mod three_layer;

pub(crate) mod exec;

pub use engine::{scan, ScanConfig, ScanReport};
pub use finding::{DetectorKind, SecretFinding};
