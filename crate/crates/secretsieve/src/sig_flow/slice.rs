//! Inter-procedural backward constant propagation over the string domain.
//!
//! The abstract value is a concatenation sequence of constant fragments and
//! holes; a slice resolves when a single concrete string is forced within
//! budget. Transfers cover string constants, local copies, static field
//! loads (initializers and stores), builder operations (`<init>`, `append`,
//! `toString`), `concat`, `valueOf`, constant-indexed array element reads,
//! and formal parameters, which continue backward through every call site of
//! the enclosing method (one reported path per call site, up to a fan-out
//! cap). Traversal order is fixed, so identical inputs give identical
//! traces.

use crate::finding::TraceStep;
use crate::ir::{
    ArrayIndex, CallExpr, IrApp, IrExpr, IrMethod, MethodRef, StatementKind,
};
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceBudget {
    /// Call-site cloning depth for parameter jumps.
    pub max_depth: usize,
    /// Total statements visited across one slice.
    pub max_steps: usize,
    /// Cap on simultaneously tracked constant paths.
    pub max_fanout: usize,
}

impl Default for SliceBudget {
    fn default() -> Self {
        SliceBudget {
            max_depth: 5,
            max_steps: 4000,
            max_fanout: 8,
        }
    }
}

/// A `getProperty`-style callee whose value comes from a side env map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvGetter {
    pub owner: String,
    pub method: String,
}

/// Env-file hook: textual stand-in for resource-extracted config files.
#[derive(Debug, Clone, Default)]
pub struct EnvConfig {
    pub getters: Vec<EnvGetter>,
    pub values: BTreeMap<String, String>,
}

impl EnvConfig {
    pub fn standard_getters() -> Vec<EnvGetter> {
        vec![
            EnvGetter {
                owner: "java.lang.System".into(),
                method: "getProperty".into(),
            },
            EnvGetter {
                owner: "java.util.Properties".into(),
                method: "getProperty".into(),
            },
        ]
    }

    pub fn with_values(values: BTreeMap<String, String>) -> EnvConfig {
        EnvConfig {
            getters: Self::standard_getters(),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnresolvedReason {
    NoDefinition,
    Recursive,
    OpaqueCall,
    NonConstant,
    EnvMissing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceStatus {
    Resolved(String),
    Partial {
        fragments: Vec<String>,
        holes: Vec<String>,
    },
    Unresolved(UnresolvedReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    pub status: SliceStatus,
    pub trace: Vec<TraceStep>,
    pub depth_used: usize,
}

impl SliceResult {
    pub fn resolved_value(&self) -> Option<&str> {
        match &self.status {
            SliceStatus::Resolved(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Const(String),
    Hole(Hole),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hole {
    NoDefinition,
    Recursive,
    OpaqueCall,
    NonConstant,
    EnvMissing,
    BudgetDepth,
    BudgetSteps,
    FanOut,
}

impl Hole {
    fn label(self) -> &'static str {
        match self {
            Hole::NoDefinition => "no_definition",
            Hole::Recursive => "recursive",
            Hole::OpaqueCall => "opaque_call",
            Hole::NonConstant => "non_constant",
            Hole::EnvMissing => "env_missing",
            Hole::BudgetDepth => "budget_depth",
            Hole::BudgetSteps => "budget_steps",
            Hole::FanOut => "fanout_exceeded",
        }
    }
}

#[derive(Debug, Clone)]
struct PathVal {
    pieces: Vec<Piece>,
    trace: Vec<TraceStep>,
    depth: usize,
}

impl PathVal {
    fn hole(h: Hole) -> PathVal {
        PathVal {
            pieces: vec![Piece::Hole(h)],
            trace: Vec::new(),
            depth: 0,
        }
    }
}

/// Walks definitions backward from argument `arg_index` of the call at
/// `statement_index`. Returns one result per feasible constant path; the
/// common straight-line case yields exactly one.
pub fn backward_slice(
    app: &IrApp,
    method: &MethodRef,
    statement_index: usize,
    arg_index: usize,
    budget: &SliceBudget,
    env: &EnvConfig,
) -> Vec<SliceResult> {
    let slicer = Slicer {
        app,
        env,
        budget,
        steps: Cell::new(0),
    };
    let Some(m) = app.find_method(&method.class, &method.name, &method.param_types) else {
        return vec![SliceResult {
            status: SliceStatus::Unresolved(UnresolvedReason::NoDefinition),
            trace: Vec::new(),
            depth_used: 0,
        }];
    };
    let Some(call) = m.body.get(statement_index).and_then(|s| s.call()) else {
        return vec![SliceResult {
            status: SliceStatus::Unresolved(UnresolvedReason::NoDefinition),
            trace: Vec::new(),
            depth_used: 0,
        }];
    };
    let Some(arg) = call.args.get(arg_index) else {
        return vec![SliceResult {
            status: SliceStatus::Unresolved(UnresolvedReason::NoDefinition),
            trace: Vec::new(),
            depth_used: 0,
        }];
    };
    let mut stack = Vec::new();
    let paths = slicer.eval_expr(m, statement_index, arg, &mut stack, 0);
    paths.into_iter().map(finish_path).collect()
}

fn finish_path(path: PathVal) -> SliceResult {
    // Merge adjacent constants.
    let mut merged: Vec<Piece> = Vec::new();
    for piece in path.pieces {
        match (merged.last_mut(), piece) {
            (Some(Piece::Const(a)), Piece::Const(b)) => a.push_str(&b),
            (_, p) => merged.push(p),
        }
    }
    let fragments: Vec<String> = merged
        .iter()
        .filter_map(|p| match p {
            Piece::Const(s) => Some(s.clone()),
            Piece::Hole(_) => None,
        })
        .collect();
    let holes: Vec<Hole> = merged
        .iter()
        .filter_map(|p| match p {
            Piece::Hole(h) => Some(*h),
            Piece::Const(_) => None,
        })
        .collect();

    let status = if holes.is_empty() {
        SliceStatus::Resolved(fragments.concat())
    } else if !fragments.is_empty()
        || holes
            .iter()
            .all(|h| matches!(h, Hole::BudgetDepth | Hole::BudgetSteps | Hole::FanOut))
    {
        SliceStatus::Partial {
            fragments,
            holes: holes.iter().map(|h| h.label().to_string()).collect(),
        }
    } else {
        let reason = if holes.contains(&Hole::Recursive) {
            UnresolvedReason::Recursive
        } else {
            match holes[0] {
                Hole::NoDefinition => UnresolvedReason::NoDefinition,
                Hole::OpaqueCall => UnresolvedReason::OpaqueCall,
                Hole::NonConstant => UnresolvedReason::NonConstant,
                Hole::EnvMissing => UnresolvedReason::EnvMissing,
                Hole::Recursive => UnresolvedReason::Recursive,
                Hole::BudgetDepth | Hole::BudgetSteps | Hole::FanOut => unreachable!(),
            }
        };
        SliceStatus::Unresolved(reason)
    };
    SliceResult {
        status,
        trace: path.trace,
        depth_used: path.depth,
    }
}

struct Slicer<'a> {
    app: &'a IrApp,
    env: &'a EnvConfig,
    budget: &'a SliceBudget,
    steps: Cell<usize>,
}

type MethodKey = (String, String, Vec<String>);

fn key_of(m: &IrMethod) -> MethodKey {
    (m.owner.clone(), m.name.clone(), m.param_types.clone())
}

fn step(m: &IrMethod, index: usize, transfer: impl Into<String>) -> TraceStep {
    TraceStep {
        class: m.owner.clone(),
        method: m.name.clone(),
        statement_index: index,
        transfer: transfer.into(),
    }
}

fn is_builder_owner(owner: Option<&str>) -> bool {
    matches!(
        owner,
        None | Some("java.lang.StringBuilder") | Some("java.lang.StringBuffer")
    )
}

fn is_append(call: &CallExpr) -> bool {
    call.callee.name == "append" && is_builder_owner(call.callee.owner.as_deref())
}

fn is_to_string(call: &CallExpr) -> bool {
    call.callee.name == "toString" && is_builder_owner(call.callee.owner.as_deref())
}

fn is_builder_init(call: &CallExpr) -> bool {
    call.callee.name == "<init>"
        && matches!(
            call.callee.owner.as_deref(),
            Some("java.lang.StringBuilder") | Some("java.lang.StringBuffer")
        )
}

fn is_concat(call: &CallExpr) -> bool {
    call.callee.name == "concat"
        && matches!(call.callee.owner.as_deref(), None | Some("java.lang.String"))
}

fn is_value_of(call: &CallExpr) -> bool {
    call.callee.name == "valueOf"
        && matches!(call.callee.owner.as_deref(), Some("java.lang.String"))
}

impl<'a> Slicer<'a> {
    fn charge_step(&self) -> bool {
        let used = self.steps.get() + 1;
        self.steps.set(used);
        used <= self.budget.max_steps
    }

    fn is_env_getter(&self, call: &CallExpr) -> bool {
        self.env.getters.iter().any(|g| {
            call.callee.name == g.method
                && call
                    .callee
                    .owner
                    .as_deref()
                    .is_some_and(|owner| owner == g.owner)
        })
    }

    /// Caps a path set at the fan-out budget, marking the overflow.
    fn cap(&self, mut paths: Vec<PathVal>) -> Vec<PathVal> {
        if paths.len() > self.budget.max_fanout {
            paths.truncate(self.budget.max_fanout);
            paths.push(PathVal::hole(Hole::FanOut));
        }
        paths
    }

    fn concat(&self, lhs: Vec<PathVal>, rhs: Vec<PathVal>) -> Vec<PathVal> {
        let mut out = Vec::new();
        for a in &lhs {
            for b in &rhs {
                let mut pieces = a.pieces.clone();
                pieces.extend(b.pieces.iter().cloned());
                let mut trace = a.trace.clone();
                trace.extend(b.trace.iter().cloned());
                out.push(PathVal {
                    pieces,
                    trace,
                    depth: a.depth.max(b.depth),
                });
            }
        }
        self.cap(out)
    }

    fn eval_expr(
        &self,
        m: &IrMethod,
        at: usize,
        expr: &IrExpr,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        match expr {
            IrExpr::StringConst(s) => vec![PathVal {
                pieces: vec![Piece::Const(s.clone())],
                trace: vec![step(m, at, "string constant")],
                depth,
            }],
            IrExpr::LocalRef(name) => self.eval_local(m, at, name, stack, depth),
            IrExpr::FieldRef { owner, name, .. } => {
                let mut paths = self.eval_field(owner, name, stack, depth);
                for p in &mut paths {
                    p.trace
                        .insert(0, step(m, at, format!("load field <{owner}: {name}>")));
                }
                paths
            }
            IrExpr::Call(call) => self.eval_call(m, at, call, stack, depth),
            IrExpr::ArrayRef { base, index } => match index {
                ArrayIndex::Const(i) => self.eval_array_elem(m, at, base, *i, stack, depth),
                ArrayIndex::Local(_) => vec![PathVal {
                    pieces: vec![Piece::Hole(Hole::NonConstant)],
                    trace: vec![step(m, at, "dynamic array index")],
                    depth,
                }],
            },
            IrExpr::NewArray { .. } => vec![PathVal {
                pieces: vec![Piece::Hole(Hole::NonConstant)],
                trace: vec![step(m, at, "array in string position")],
                depth,
            }],
            IrExpr::Unknown => vec![PathVal {
                pieces: vec![Piece::Hole(Hole::OpaqueCall)],
                trace: vec![step(m, at, "unparsed expression")],
                depth,
            }],
        }
    }

    fn eval_call(
        &self,
        m: &IrMethod,
        at: usize,
        call: &CallExpr,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        if is_append(call) {
            let recv = match &call.receiver {
                Some(r) => r,
                None => return vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let base = self.eval_local(m, at, recv, stack, depth);
            let arg = match call.args.first() {
                Some(a) => self.eval_expr(m, at, a, stack, depth),
                None => vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let mut out = self.concat(base, arg);
            for p in &mut out {
                p.trace.push(step(m, at, "append"));
            }
            return out;
        }
        if is_to_string(call) {
            let recv = match &call.receiver {
                Some(r) => r,
                None => return vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let mut out = self.eval_local(m, at, recv, stack, depth);
            for p in &mut out {
                p.trace.push(step(m, at, "toString"));
            }
            return out;
        }
        if is_concat(call) {
            let recv = match &call.receiver {
                Some(r) => r,
                None => return vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let base = self.eval_local(m, at, recv, stack, depth);
            let arg = match call.args.first() {
                Some(a) => self.eval_expr(m, at, a, stack, depth),
                None => vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let mut out = self.concat(base, arg);
            for p in &mut out {
                p.trace.push(step(m, at, "concat"));
            }
            return out;
        }
        if is_value_of(call) {
            return match call.args.first() {
                Some(a) => {
                    let mut out = self.eval_expr(m, at, a, stack, depth);
                    for p in &mut out {
                        p.trace.push(step(m, at, "valueOf"));
                    }
                    out
                }
                None => vec![PathVal::hole(Hole::OpaqueCall)],
            };
        }
        if self.is_env_getter(call) {
            let key_paths = match call.args.first() {
                Some(a) => self.eval_expr(m, at, a, stack, depth),
                None => vec![PathVal::hole(Hole::OpaqueCall)],
            };
            let mut out = Vec::new();
            for kp in key_paths {
                let key = kp.pieces.iter().try_fold(String::new(), |acc, p| match p {
                    Piece::Const(s) => Some(acc + s),
                    Piece::Hole(_) => None,
                });
                let mut path = match key.as_deref().map(|k| self.env.values.get(k)) {
                    Some(Some(value)) => PathVal {
                        pieces: vec![Piece::Const(value.clone())],
                        trace: kp.trace,
                        depth: kp.depth,
                    },
                    Some(None) => PathVal {
                        pieces: vec![Piece::Hole(Hole::EnvMissing)],
                        trace: kp.trace,
                        depth: kp.depth,
                    },
                    None => PathVal {
                        pieces: vec![Piece::Hole(Hole::NonConstant)],
                        trace: kp.trace,
                        depth: kp.depth,
                    },
                };
                path.trace.push(step(
                    m,
                    at,
                    format!("env lookup via {}", call.callee.name),
                ));
                out.push(path);
            }
            return self.cap(out);
        }
        vec![PathVal {
            pieces: vec![Piece::Hole(Hole::OpaqueCall)],
            trace: vec![step(m, at, format!("opaque call {}", call.callee.name))],
            depth,
        }]
    }

    /// Value of local `name` just before statement `at`.
    fn eval_local(
        &self,
        m: &IrMethod,
        at: usize,
        name: &str,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        for i in (0..at).rev() {
            if !self.charge_step() {
                return vec![PathVal::hole(Hole::BudgetSteps)];
            }
            match &m.body[i].kind {
                StatementKind::Assign { lhs: Some(l), rhs } if l == name => {
                    let mut paths = self.eval_expr(m, i, rhs, stack, depth);
                    for p in &mut paths {
                        p.trace.insert(0, step(m, i, format!("def of {name}")));
                    }
                    return paths;
                }
                StatementKind::Invoke(call) if call.receiver.as_deref() == Some(name) => {
                    if is_to_string(call) {
                        // Discarded toString() does not mutate the
                        // receiver.
                        continue;
                    }
                    if is_builder_init(call) {
                        let mut paths = match call.args.first() {
                            Some(a) => self.eval_expr(m, i, a, stack, depth),
                            None => vec![PathVal {
                                pieces: vec![Piece::Const(String::new())],
                                trace: Vec::new(),
                                depth,
                            }],
                        };
                        for p in &mut paths {
                            p.trace.insert(0, step(m, i, "builder <init>"));
                        }
                        return paths;
                    }
                    if is_append(call) {
                        let base = self.eval_local(m, i, name, stack, depth);
                        let arg = match call.args.first() {
                            Some(a) => self.eval_expr(m, i, a, stack, depth),
                            None => vec![PathVal::hole(Hole::OpaqueCall)],
                        };
                        let mut out = self.concat(base, arg);
                        for p in &mut out {
                            p.trace.push(step(m, i, "append"));
                        }
                        return out;
                    }
                    // Some other mutation of the receiver we cannot model.
                    return vec![PathVal {
                        pieces: vec![Piece::Hole(Hole::OpaqueCall)],
                        trace: vec![step(m, i, format!("opaque call {}", call.callee.name))],
                        depth,
                    }];
                }
                _ => {}
            }
        }
        // No defining statement: formal parameters continue at call sites.
        if let Some(idx) = param_index(name, m.param_types.len()) {
            return self.eval_param(m, idx, stack, depth);
        }
        vec![PathVal::hole(Hole::NoDefinition)]
    }

    fn eval_param(
        &self,
        m: &IrMethod,
        idx: usize,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        let key = key_of(m);
        if stack.contains(&key) {
            return vec![PathVal::hole(Hole::Recursive)];
        }
        if depth + 1 > self.budget.max_depth {
            return vec![PathVal::hole(Hole::BudgetDepth)];
        }
        stack.push(key);
        let mut out = Vec::new();
        'outer: for class in &self.app.classes {
            for caller in &class.methods {
                for stmt in &caller.body {
                    let Some(call) = stmt.call() else { continue };
                    let callee = &call.callee;
                    if callee.name != m.name
                        || callee.owner.as_deref() != Some(m.owner.as_str())
                        || callee.param_types.as_deref() != Some(&m.param_types[..])
                    {
                        continue;
                    }
                    let Some(arg) = call.args.get(idx) else { continue };
                    let mut paths = self.eval_expr(caller, stmt.index, arg, stack, depth + 1);
                    for p in &mut paths {
                        p.depth = p.depth.max(depth + 1);
                        p.trace.insert(
                            0,
                            step(
                                caller,
                                stmt.index,
                                format!("argument {idx} of call to {}.{}", m.owner, m.name),
                            ),
                        );
                    }
                    out.extend(paths);
                    if out.len() > self.budget.max_fanout {
                        out.truncate(self.budget.max_fanout);
                        out.push(PathVal::hole(Hole::FanOut));
                        break 'outer;
                    }
                }
            }
        }
        stack.pop();
        if out.is_empty() {
            return vec![PathVal::hole(Hole::NoDefinition)];
        }
        out
    }

    fn eval_field(
        &self,
        owner: &str,
        name: &str,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        let Some(class) = self.app.find_class(owner) else {
            // External class: only the name is visible.
            return vec![PathVal::hole(Hole::NoDefinition)];
        };
        if let Some(field) = class.static_fields.iter().find(|f| f.name == name) {
            if let Some(init) = &field.init {
                return vec![PathVal {
                    pieces: vec![Piece::Const(init.clone())],
                    trace: Vec::new(),
                    depth,
                }];
            }
        }
        // No initializer: every store to the field is a reaching definition.
        let mut out = Vec::new();
        for class in &self.app.classes {
            for method in &class.methods {
                for stmt in &method.body {
                    if let StatementKind::FieldStore {
                        owner: o,
                        name: n,
                        value,
                        ..
                    } = &stmt.kind
                    {
                        if o == owner && n == name {
                            let mut paths =
                                self.eval_expr(method, stmt.index, value, stack, depth);
                            for p in &mut paths {
                                p.trace.insert(
                                    0,
                                    step(method, stmt.index, format!("store to <{owner}: {name}>")),
                                );
                            }
                            out.extend(paths);
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return vec![PathVal::hole(Hole::NoDefinition)];
        }
        self.cap(out)
    }

    /// Constant-indexed array element: all stores to that index must be
    /// constant; the last store before the use wins.
    fn eval_array_elem(
        &self,
        m: &IrMethod,
        at: usize,
        base: &str,
        want: usize,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        // Find the array's birth (or an alias/field source) backward from
        // the use.
        for i in (0..at).rev() {
            if !self.charge_step() {
                return vec![PathVal::hole(Hole::BudgetSteps)];
            }
            match &m.body[i].kind {
                StatementKind::Assign { lhs: Some(l), rhs } if l == base => {
                    return match rhs {
                        IrExpr::NewArray { .. } => {
                            self.array_value_between(m, i + 1..at, base, want, stack, depth)
                        }
                        IrExpr::LocalRef(alias) => {
                            self.eval_array_elem(m, i, alias, want, stack, depth)
                        }
                        IrExpr::FieldRef { owner, name, .. } => {
                            self.eval_field_array_elem(owner, name, want, stack, depth)
                        }
                        _ => vec![PathVal::hole(Hole::NonConstant)],
                    };
                }
                _ => {}
            }
        }
        vec![PathVal::hole(Hole::NoDefinition)]
    }

    /// Element value over the statement span between the array's birth and
    /// its read.
    fn array_value_between(
        &self,
        m: &IrMethod,
        span: std::ops::Range<usize>,
        base: &str,
        want: usize,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        let mut last_store: Option<usize> = None;
        for i in span {
            if let StatementKind::ArrayStore {
                base: b, index, ..
            } = &m.body[i].kind
            {
                if b == base {
                    match index {
                        ArrayIndex::Const(k) if *k == want => last_store = Some(i),
                        ArrayIndex::Const(_) => {}
                        // A store through a dynamic index may clobber any
                        // element.
                        ArrayIndex::Local(_) => return vec![PathVal::hole(Hole::NonConstant)],
                    }
                }
            }
        }
        match last_store {
            Some(i) => {
                let StatementKind::ArrayStore { value, .. } = &m.body[i].kind else {
                    unreachable!()
                };
                let mut paths = self.eval_expr(m, i, value, stack, depth);
                for p in &mut paths {
                    p.trace
                        .insert(0, step(m, i, format!("array store {base}[{want}]")));
                }
                paths
            }
            None => vec![PathVal::hole(Hole::NoDefinition)],
        }
    }

    /// Array stored into a static field (Listing-3 shape): follow each field
    /// store back to the local array it captured.
    fn eval_field_array_elem(
        &self,
        owner: &str,
        name: &str,
        want: usize,
        stack: &mut Vec<MethodKey>,
        depth: usize,
    ) -> Vec<PathVal> {
        let mut out = Vec::new();
        for class in &self.app.classes {
            for method in &class.methods {
                for stmt in &method.body {
                    if let StatementKind::FieldStore {
                        owner: o,
                        name: n,
                        value: IrExpr::LocalRef(local),
                        ..
                    } = &stmt.kind
                    {
                        if o == owner && n == name {
                            let mut paths = self
                                .eval_array_elem(method, stmt.index, local, want, stack, depth);
                            for p in &mut paths {
                                p.trace.insert(
                                    0,
                                    step(
                                        method,
                                        stmt.index,
                                        format!("array field <{owner}: {name}>"),
                                    ),
                                );
                            }
                            out.extend(paths);
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return vec![PathVal::hole(Hole::NoDefinition)];
        }
        self.cap(out)
    }
}

/// Locals `p0..p{n-1}` denote the formal parameters (see the grammar doc).
fn param_index(name: &str, arity: usize) -> Option<usize> {
    let rest = name.strip_prefix('p')?;
    let idx: usize = rest.parse().ok()?;
    (idx < arity).then_some(idx)
}
