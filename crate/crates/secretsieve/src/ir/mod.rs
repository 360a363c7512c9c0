//! Parsed model of the Jimple-like textual IR and lookup helpers.
//!
//! One app is a set of class units, each holding static fields and methods
//! whose bodies are flat, ordered statement lists. The grammar is a small,
//! documented subset of Jimple (see `docs/ir-grammar.md`); anything outside
//! it degrades to an `Unknown` expression instead of aborting the file.
//!
//! All types are immutable after parse and safe to share across threads.

mod parse;
mod print;

pub use parse::parse_app;

use std::collections::BTreeMap;
use std::fmt;

/// Parsed model of one app: its class units plus which file each came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrApp {
    pub app_id: String,
    pub classes: Vec<IrClassUnit>,
    /// File path -> qualified names of the class units parsed from it.
    pub source_manifest: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrClassUnit {
    /// Dotted path: package segments plus simple name.
    pub qualified_name: String,
    pub static_fields: Vec<IrStaticField>,
    pub methods: Vec<IrMethod>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrStaticField {
    pub field_type: String,
    pub name: String,
    /// Constant string initializer, when declared with one.
    pub init: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrMethod {
    pub owner: String,
    pub name: String,
    pub param_types: Vec<String>,
    pub return_type: String,
    pub body: Vec<IrStatement>,
    /// Every local referenced anywhere in the body.
    pub locals: std::collections::BTreeSet<String>,
}

/// Statement indices are dense `0..body.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrStatement {
    pub index: usize,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    /// `lhs = rhs`. `lhs` is `None` when the whole line was unparseable and
    /// only the damage marker survived.
    Assign { lhs: Option<String>, rhs: IrExpr },
    /// Bare invocation whose result (if any) is discarded.
    Invoke(CallExpr),
    Return(Option<IrExpr>),
    /// `<owner: type name> = value`
    FieldStore {
        owner: String,
        field_type: String,
        name: String,
        value: IrExpr,
    },
    /// `base[index] = value`
    ArrayStore {
        base: String,
        index: ArrayIndex,
        value: IrExpr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrayIndex {
    Const(usize),
    Local(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrExpr {
    /// Stored exactly as written: no case folding, no trimming.
    StringConst(String),
    LocalRef(String),
    FieldRef {
        owner: String,
        field_type: String,
        name: String,
    },
    Call(CallExpr),
    NewArray {
        elem_type: String,
        length: usize,
    },
    ArrayRef {
        base: String,
        index: ArrayIndex,
    },
    /// Decompiler damage or constructs outside the grammar subset.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvokeKind {
    Virtual,
    Special,
    Static,
    Interface,
    /// `recv.name(args)` with no full signature, as produced by partially
    /// decompiled code. Owner and parameter types are unknown.
    Shorthand,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallExpr {
    pub kind: InvokeKind,
    pub receiver: Option<String>,
    pub callee: CalleeSig,
    pub args: Vec<IrExpr>,
}

/// Callee descriptor. External callees are modeled by signature only;
/// shorthand calls carry just the method name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalleeSig {
    pub owner: Option<String>,
    pub return_type: Option<String>,
    pub name: String,
    pub param_types: Option<Vec<String>>,
}

impl CalleeSig {
    pub fn shorthand(name: &str) -> Self {
        CalleeSig {
            owner: None,
            return_type: None,
            name: name.to_string(),
            param_types: None,
        }
    }

    pub fn full(owner: &str, return_type: &str, name: &str, param_types: Vec<String>) -> Self {
        CalleeSig {
            owner: Some(owner.to_string()),
            return_type: Some(return_type.to_string()),
            name: name.to_string(),
            param_types: Some(param_types),
        }
    }
}

/// Identifies a method within an app.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodRef {
    pub class: String,
    pub name: String,
    pub param_types: Vec<String>,
}

impl MethodRef {
    pub fn of(method: &IrMethod) -> Self {
        MethodRef {
            class: method.owner.clone(),
            name: method.name.clone(),
            param_types: method.param_types.clone(),
        }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{}({})",
            self.class,
            self.name,
            self.param_types.join(",")
        )
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IrError {
    #[error("{path}:{line}: {msg}")]
    FileSyntax {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("window center {center} out of range for body of {len} statements")]
    IndexOutOfRange { center: usize, len: usize },
}

impl IrApp {
    /// Looks up a method by fully qualified owner, name, and parameter types.
    pub fn find_method(&self, owner: &str, name: &str, param_types: &[String]) -> Option<&IrMethod> {
        self.classes
            .iter()
            .find(|c| c.qualified_name == owner)?
            .methods
            .iter()
            .find(|m| m.name == name && m.param_types == param_types)
    }

    pub fn find_class(&self, qualified_name: &str) -> Option<&IrClassUnit> {
        self.classes
            .iter()
            .find(|c| c.qualified_name == qualified_name)
    }

    /// Renders the whole app back to its textual form, one entry per class
    /// unit in `(file path, text)` shape. Re-parsing the output yields a
    /// structurally equal app.
    pub fn render_files(&self) -> Vec<(String, String)> {
        print::render_files(self)
    }

    /// Renders a single class unit.
    pub fn render_class(class: &IrClassUnit) -> String {
        print::render_class(class)
    }
}

impl IrStatement {
    /// The top-level call carried by this statement, if any.
    pub fn call(&self) -> Option<&CallExpr> {
        match &self.kind {
            StatementKind::Invoke(c) => Some(c),
            StatementKind::Assign {
                rhs: IrExpr::Call(c),
                ..
            } => Some(c),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        print::render_statement(self)
    }
}

/// Returns every statement carrying a call whose callee satisfies the
/// predicate, in deterministic (class, method, statement) order.
pub fn find_callsites(
    app: &IrApp,
    mut callee_matcher: impl FnMut(&CalleeSig) -> bool,
) -> Vec<(MethodRef, usize)> {
    let mut out = Vec::new();
    for class in &app.classes {
        for method in &class.methods {
            for stmt in &method.body {
                if let Some(call) = stmt.call() {
                    if callee_matcher(&call.callee) {
                        out.push((MethodRef::of(method), stmt.index));
                    }
                }
            }
        }
    }
    out
}

/// Statements `[center-radius, center+radius]` clipped to the method bounds,
/// center included.
pub fn method_window(
    method: &IrMethod,
    center: usize,
    radius: usize,
) -> Result<&[IrStatement], IrError> {
    let len = method.body.len();
    if center >= len {
        return Err(IrError::IndexOutOfRange { center, len });
    }
    let lo = center.saturating_sub(radius);
    let hi = (center + radius + 1).min(len);
    Ok(&method.body[lo..hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method_with_n_statements(n: usize) -> IrMethod {
        let body = (0..n)
            .map(|index| IrStatement {
                index,
                kind: StatementKind::Return(None),
            })
            .collect();
        IrMethod {
            owner: "a.B".into(),
            name: "m".into(),
            param_types: vec![],
            return_type: "void".into(),
            body,
            locals: Default::default(),
        }
    }

    #[test]
    fn window_exact_fit_returns_whole_body() {
        let m = method_with_n_statements(13);
        let w = method_window(&m, 6, 6).unwrap();
        assert_eq!(w.len(), 13);
        assert_eq!(w[0].index, 0);
        assert_eq!(w[12].index, 12);
    }

    #[test]
    fn window_clips_to_bounds() {
        let m = method_with_n_statements(4);
        let w = method_window(&m, 0, 6).unwrap();
        let indices: Vec<usize> = w.iter().map(|s| s.index).collect();
        assert_eq!(indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn window_radius_zero_is_singleton() {
        let m = method_with_n_statements(5);
        let w = method_window(&m, 2, 0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].index, 2);
    }

    #[test]
    fn window_center_out_of_range() {
        let m = method_with_n_statements(3);
        assert_eq!(
            method_window(&m, 3, 1),
            Err(IrError::IndexOutOfRange { center: 3, len: 3 })
        );
    }

    #[test]
    fn callsite_search_over_array_assembly_snippet() {
        let app = parse_app(
            "app",
            &[(
                "jp.jir".to_string(),
                "class jp.b\nmethod void fill() {\n  $r0 = newarray (java.lang.String)[3]\n  $r0[0] = \"\"\n  $r0[1] = \"67\"\n  $r0[2] = \"\"\n  <jp.b: java.lang.String[] c> = $r0\n}\n"
                    .to_string(),
            )],
        )
        .unwrap();
        // No append call exists anywhere in this snippet.
        assert!(find_callsites(&app, |c| c.name == "append").is_empty());
        // And a predicate matching nothing stays empty.
        assert!(find_callsites(&app, |_| false).is_empty());
    }

    #[test]
    fn callsite_search_finds_azure_parse() {
        let app = parse_app(
            "app",
            &[(
                "a.jir".to_string(),
                "class a.B\nmethod void m() {\n  $x = staticinvoke <com.microsoft.azure.storage.CloudStorageAccount: com.microsoft.azure.storage.CloudStorageAccount parse(java.lang.String)>(\"conn\")\n}\n"
                    .to_string(),
            )],
        )
        .unwrap();
        let hits = find_callsites(&app, |c| {
            c.owner.as_deref() == Some("com.microsoft.azure.storage.CloudStorageAccount")
                && c.name == "parse"
        });
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].1, 0);
    }
}
