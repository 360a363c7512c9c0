//! Literal-preserving identifier renaming.
//!
//! Classes, methods, static fields, and locals are renamed to short random
//! identifiers, consistently across call sites and field references —
//! including the owners of external SDK callees, which is what defeats
//! name-based matching in real apps. Platform classes (`java.*`, `javax.*`,
//! `android.*`) keep their names, as platform code cannot be rewritten by
//! an app obfuscator; string-manipulation folding therefore keeps working.
//! Every string literal stays byte-identical.
//!
//! Parameter locals `p0..pn` are positional slots in this IR and keep their
//! names.

use crate::ir::{
    ArrayIndex, CallExpr, CalleeSig, IrApp, IrClassUnit, IrExpr, IrMethod, IrStatement,
    IrStaticField, StatementKind,
};
use crate::sig_flow::ApiSignature;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameMap {
    /// Original qualified class name -> new qualified name (app classes and
    /// non-platform external owners alike).
    pub classes: BTreeMap<String, String>,
    /// (original owner, original method name) -> new method name.
    pub methods: BTreeMap<(String, String), String>,
    /// (original owner, original field name) -> new field name.
    pub fields: BTreeMap<(String, String), String>,
}

impl RenameMap {
    pub fn class(&self, name: &str) -> String {
        self.classes.get(name).cloned().unwrap_or_else(|| name.to_string())
    }

    pub fn method(&self, owner: &str, name: &str) -> String {
        self.methods
            .get(&(owner.to_string(), name.to_string()))
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }

    pub fn field(&self, owner: &str, name: &str) -> String {
        self.fields
            .get(&(owner.to_string(), name.to_string()))
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }

    /// Rewrites a catalog signature through the map, so exact-mode matching
    /// keeps working on the obfuscated app.
    pub fn remap_signature(&self, sig: &ApiSignature) -> ApiSignature {
        let mut out = sig.clone();
        out.method = self.method(&sig.owner, &sig.method);
        out.owner = self.class(&sig.owner);
        out
    }
}

fn is_platform(owner: &str) -> bool {
    owner.starts_with("java.") || owner.starts_with("javax.") || owner.starts_with("android.")
}

struct NameGen {
    letters: Vec<char>,
    counter: usize,
}

impl NameGen {
    fn new(rng: &mut ChaCha8Rng) -> NameGen {
        let mut letters: Vec<char> = ('a'..='z').collect();
        letters.shuffle(rng);
        NameGen { letters, counter: 0 }
    }

    /// Short base-26 identifiers over a shuffled alphabet: a, b, ..., aa, ...
    fn next(&mut self) -> String {
        let mut n = self.counter;
        self.counter += 1;
        let mut out = String::new();
        loop {
            out.push(self.letters[n % 26]);
            n /= 26;
            if n == 0 {
                break;
            }
            n -= 1;
        }
        out
    }
}

/// Renames identifiers consistently; string literals and statement
/// structure are untouched.
pub fn obfuscate(app: &IrApp, seed: u64) -> (IrApp, RenameMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut class_gen = NameGen::new(&mut rng);
    let mut member_gen = NameGen::new(&mut rng);
    let pkg = {
        let mut g = NameGen::new(&mut rng);
        format!("{}{}", g.next(), g.next())
    };

    let mut map = RenameMap::default();

    // Pass 1: collect every owner mentioned anywhere (class units, callee
    // owners, field owners) in deterministic order.
    let mut owners: Vec<String> = Vec::new();
    let note_owner = |owners: &mut Vec<String>, name: &str| {
        if !is_platform(name) && !owners.iter().any(|o| o == name) {
            owners.push(name.to_string());
        }
    };
    for class in &app.classes {
        note_owner(&mut owners, &class.qualified_name);
    }
    let note_call = |owners: &mut Vec<String>, call: &CallExpr| {
        if let Some(owner) = &call.callee.owner {
            if !is_platform(owner) && !owners.iter().any(|o| o == owner) {
                owners.push(owner.clone());
            }
        }
    };
    for class in &app.classes {
        for method in &class.methods {
            for stmt in &method.body {
                visit_statement_calls(&stmt.kind, &mut |call| note_call(&mut owners, call));
                visit_statement_fields(&stmt.kind, &mut |owner, _| {
                    note_owner(&mut owners, owner)
                });
            }
        }
    }
    for owner in &owners {
        let fresh = format!("{pkg}.{}", class_gen.next());
        map.classes.insert(owner.clone(), fresh);
    }

    // Pass 2: method and field names per (owner, name).
    let note_method = |map: &mut RenameMap, gen: &mut NameGen, owner: &str, name: &str| {
        if is_platform(owner) || name == "<init>" || name == "<clinit>" {
            return;
        }
        let key = (owner.to_string(), name.to_string());
        map.methods.entry(key).or_insert_with(|| gen.next());
    };
    for class in &app.classes {
        for field in &class.static_fields {
            let key = (class.qualified_name.clone(), field.name.clone());
            map.fields.entry(key).or_insert_with(|| member_gen.next());
        }
        for method in &class.methods {
            note_method(&mut map, &mut member_gen, &class.qualified_name, &method.name);
            for stmt in &method.body {
                visit_statement_calls(&stmt.kind, &mut |call| {
                    if let Some(owner) = &call.callee.owner {
                        note_method(&mut map, &mut member_gen, owner, &call.callee.name);
                    }
                });
                visit_statement_fields(&stmt.kind, &mut |owner, name| {
                    if !is_platform(owner) {
                        let key = (owner.to_string(), name.to_string());
                        map.fields
                            .entry(key)
                            .or_insert_with(|| member_gen.next());
                    }
                });
            }
        }
    }

    // Pass 3: rewrite the app through the map.
    let classes = app
        .classes
        .iter()
        .map(|class| rewrite_class(class, &map, seed))
        .collect();
    let source_manifest = app
        .source_manifest
        .iter()
        .map(|(path, names)| {
            (
                path.clone(),
                names.iter().map(|n| map.class(n)).collect(),
            )
        })
        .collect();

    (
        IrApp {
            app_id: app.app_id.clone(),
            classes,
            source_manifest,
        },
        map,
    )
}

fn visit_statement_calls(kind: &StatementKind, f: &mut impl FnMut(&CallExpr)) {
    fn visit_expr(expr: &IrExpr, f: &mut impl FnMut(&CallExpr)) {
        if let IrExpr::Call(call) = expr {
            f(call);
            for arg in &call.args {
                visit_expr(arg, f);
            }
        }
    }
    match kind {
        StatementKind::Assign { rhs, .. } => visit_expr(rhs, f),
        StatementKind::Invoke(call) => {
            f(call);
            for arg in &call.args {
                visit_expr(arg, f);
            }
        }
        StatementKind::Return(Some(expr)) => visit_expr(expr, f),
        StatementKind::FieldStore { value, .. } => visit_expr(value, f),
        StatementKind::ArrayStore { value, .. } => visit_expr(value, f),
        StatementKind::Return(None) => {}
    }
}

fn visit_statement_fields(kind: &StatementKind, f: &mut impl FnMut(&str, &str)) {
    fn visit_expr(expr: &IrExpr, f: &mut impl FnMut(&str, &str)) {
        match expr {
            IrExpr::FieldRef { owner, name, .. } => f(owner, name),
            IrExpr::Call(call) => {
                for arg in &call.args {
                    visit_expr(arg, f);
                }
            }
            _ => {}
        }
    }
    match kind {
        StatementKind::Assign { rhs, .. } => visit_expr(rhs, f),
        StatementKind::Invoke(call) => {
            for arg in &call.args {
                visit_expr(arg, f);
            }
        }
        StatementKind::Return(Some(expr)) => visit_expr(expr, f),
        StatementKind::FieldStore { owner, name, value, .. } => {
            f(owner, name);
            visit_expr(value, f);
        }
        StatementKind::ArrayStore { value, .. } => visit_expr(value, f),
        StatementKind::Return(None) => {}
    }
}

fn rewrite_class(class: &IrClassUnit, map: &RenameMap, seed: u64) -> IrClassUnit {
    let new_name = map.class(&class.qualified_name);
    IrClassUnit {
        qualified_name: new_name.clone(),
        static_fields: class
            .static_fields
            .iter()
            .map(|f| IrStaticField {
                field_type: f.field_type.clone(),
                name: map.field(&class.qualified_name, &f.name),
                init: f.init.clone(),
            })
            .collect(),
        methods: class
            .methods
            .iter()
            .enumerate()
            .map(|(mi, m)| rewrite_method(m, &new_name, map, seed ^ (mi as u64).wrapping_mul(0x9e37)) )
            .collect(),
    }
}

fn rewrite_method(method: &IrMethod, new_owner: &str, map: &RenameMap, local_seed: u64) -> IrMethod {
    // Fresh local names per method; parameter slots keep their names.
    let mut rng = ChaCha8Rng::seed_from_u64(local_seed);
    let mut gen = NameGen::new(&mut rng);
    let mut locals: BTreeMap<String, String> = BTreeMap::new();
    for local in &method.locals {
        if is_param_slot(local, method.param_types.len()) {
            locals.insert(local.clone(), local.clone());
        } else {
            locals.insert(local.clone(), format!("${}", gen.next()));
        }
    }
    let rename_local =
        |name: &str| -> String { locals.get(name).cloned().unwrap_or_else(|| name.to_string()) };

    let rewrite_index = |index: &ArrayIndex| -> ArrayIndex {
        match index {
            ArrayIndex::Const(i) => ArrayIndex::Const(*i),
            ArrayIndex::Local(l) => ArrayIndex::Local(rename_local(l)),
        }
    };

    fn rewrite_callee(callee: &CalleeSig, map: &RenameMap) -> CalleeSig {
        match &callee.owner {
            Some(owner) => CalleeSig {
                owner: Some(map.class(owner)),
                return_type: callee.return_type.clone(),
                name: map.method(owner, &callee.name),
                param_types: callee.param_types.clone(),
            },
            None => callee.clone(),
        }
    }

    struct Ctx<'a> {
        map: &'a RenameMap,
        rename_local: &'a dyn Fn(&str) -> String,
        rewrite_index: &'a dyn Fn(&ArrayIndex) -> ArrayIndex,
    }

    fn rewrite_expr(expr: &IrExpr, ctx: &Ctx) -> IrExpr {
        match expr {
            IrExpr::StringConst(s) => IrExpr::StringConst(s.clone()),
            IrExpr::LocalRef(l) => IrExpr::LocalRef((ctx.rename_local)(l)),
            IrExpr::FieldRef {
                owner,
                field_type,
                name,
            } => IrExpr::FieldRef {
                owner: ctx.map.class(owner),
                field_type: field_type.clone(),
                name: ctx.map.field(owner, name),
            },
            IrExpr::Call(call) => IrExpr::Call(rewrite_call(call, ctx)),
            IrExpr::NewArray { elem_type, length } => IrExpr::NewArray {
                elem_type: elem_type.clone(),
                length: *length,
            },
            IrExpr::ArrayRef { base, index } => IrExpr::ArrayRef {
                base: (ctx.rename_local)(base),
                index: (ctx.rewrite_index)(index),
            },
            IrExpr::Unknown => IrExpr::Unknown,
        }
    }

    fn rewrite_call(call: &CallExpr, ctx: &Ctx) -> CallExpr {
        CallExpr {
            kind: call.kind,
            receiver: call.receiver.as_ref().map(|r| (ctx.rename_local)(r)),
            callee: rewrite_callee(&call.callee, ctx.map),
            args: call.args.iter().map(|a| rewrite_expr(a, ctx)).collect(),
        }
    }

    let ctx = Ctx {
        map,
        rename_local: &rename_local,
        rewrite_index: &rewrite_index,
    };

    let body = method
        .body
        .iter()
        .map(|stmt| {
            let kind = match &stmt.kind {
                StatementKind::Assign { lhs, rhs } => StatementKind::Assign {
                    lhs: lhs.as_ref().map(|l| rename_local(l)),
                    rhs: rewrite_expr(rhs, &ctx),
                },
                StatementKind::Invoke(call) => StatementKind::Invoke(rewrite_call(call, &ctx)),
                StatementKind::Return(v) => {
                    StatementKind::Return(v.as_ref().map(|e| rewrite_expr(e, &ctx)))
                }
                StatementKind::FieldStore {
                    owner,
                    field_type,
                    name,
                    value,
                } => StatementKind::FieldStore {
                    owner: map.class(owner),
                    field_type: field_type.clone(),
                    name: map.field(owner, name),
                    value: rewrite_expr(value, &ctx),
                },
                StatementKind::ArrayStore { base, index, value } => StatementKind::ArrayStore {
                    base: rename_local(base),
                    index: rewrite_index(index),
                    value: rewrite_expr(value, &ctx),
                },
            };
            IrStatement {
                index: stmt.index,
                kind,
            }
        })
        .collect();

    IrMethod {
        owner: new_owner.to_string(),
        name: map.method(&method.owner, &method.name),
        param_types: method.param_types.clone(),
        return_type: method.return_type.clone(),
        body,
        locals: locals.values().cloned().collect(),
    }
}

fn is_param_slot(name: &str, arity: usize) -> bool {
    name.strip_prefix('p')
        .and_then(|rest| rest.parse::<usize>().ok())
        .is_some_and(|i| i < arity)
}
