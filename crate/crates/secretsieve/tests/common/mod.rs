//! Shared test support: a forward reference interpreter for generated IR
//! apps. It executes straight-line methods with concrete values and records
//! the argument strings observed at watched API call sites. It shares no
//! code with the backward slicer, so agreement between the two is evidence,
//! not tautology.

use secretsieve::ir::{
    ArrayIndex, CallExpr, IrApp, IrExpr, IrMethod, StatementKind,
};
use secretsieve::sig_flow::ApiSignature;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Builder(String),
    Array(Vec<Option<String>>),
    Unknown,
}

impl Value {
    fn as_str(&self) -> Option<String> {
        match self {
            Value::Str(s) | Value::Builder(s) => Some(s.clone()),
            _ => None,
        }
    }
}

/// Argument values observed at API call sites keyed by
/// (class, method name, statement index, parameter index).
pub type Observations = BTreeMap<(String, String, usize, usize), Option<String>>;

pub struct Interpreter<'a> {
    app: &'a IrApp,
    sigs: &'a [ApiSignature],
    env: &'a BTreeMap<String, String>,
    statics: BTreeMap<(String, String), Value>,
    observed: Observations,
    depth: usize,
}

const MAX_CALL_DEPTH: usize = 64;

/// Runs every zero-parameter method of the app and returns the observed
/// API arguments.
pub fn interpret_app(
    app: &IrApp,
    sigs: &[ApiSignature],
    env: &BTreeMap<String, String>,
) -> Observations {
    let mut statics = BTreeMap::new();
    for class in &app.classes {
        for field in &class.static_fields {
            let value = field
                .init
                .as_ref()
                .map(|v| Value::Str(v.clone()))
                .unwrap_or(Value::Unknown);
            statics.insert((class.qualified_name.clone(), field.name.clone()), value);
        }
    }
    let mut interp = Interpreter {
        app,
        sigs,
        env,
        statics,
        observed: BTreeMap::new(),
        depth: 0,
    };
    for class in &app.classes {
        for method in &class.methods {
            if method.param_types.is_empty() {
                interp.run_method(method, Vec::new());
            }
        }
    }
    interp.observed
}

impl<'a> Interpreter<'a> {
    fn run_method(&mut self, method: &IrMethod, args: Vec<Value>) -> Option<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return None;
        }
        self.depth += 1;
        let mut locals: BTreeMap<String, Value> = BTreeMap::new();
        for (i, v) in args.into_iter().enumerate() {
            locals.insert(format!("p{i}"), v);
        }
        let mut returned = None;
        for stmt in &method.body {
            match &stmt.kind {
                StatementKind::Assign { lhs, rhs } => {
                    let value = self.eval(rhs, &mut locals, method, stmt.index);
                    if let Some(l) = lhs {
                        locals.insert(l.clone(), value);
                    }
                }
                StatementKind::Invoke(call) => {
                    self.exec_call(call, &mut locals, method, stmt.index);
                }
                StatementKind::Return(v) => {
                    returned = v
                        .as_ref()
                        .map(|e| self.eval(e, &mut locals, method, stmt.index));
                    break;
                }
                StatementKind::FieldStore {
                    owner, name, value, ..
                } => {
                    let v = self.eval(value, &mut locals, method, stmt.index);
                    self.statics.insert((owner.clone(), name.clone()), v);
                }
                StatementKind::ArrayStore { base, index, value } => {
                    let v = self
                        .eval(value, &mut locals, method, stmt.index)
                        .as_str();
                    if let (Some(Value::Array(slots)), ArrayIndex::Const(i)) =
                        (locals.get_mut(base), index)
                    {
                        if *i < slots.len() {
                            slots[*i] = v;
                        }
                    }
                }
            }
        }
        self.depth -= 1;
        returned
    }

    fn eval(
        &mut self,
        expr: &IrExpr,
        locals: &mut BTreeMap<String, Value>,
        method: &IrMethod,
        index: usize,
    ) -> Value {
        match expr {
            IrExpr::StringConst(s) => Value::Str(s.clone()),
            IrExpr::LocalRef(name) => locals.get(name).cloned().unwrap_or(Value::Unknown),
            IrExpr::FieldRef { owner, name, .. } => self
                .statics
                .get(&(owner.clone(), name.clone()))
                .cloned()
                .unwrap_or(Value::Unknown),
            IrExpr::NewArray { length, .. } => Value::Array(vec![None; *length]),
            IrExpr::ArrayRef { base, index } => match (locals.get(base), index) {
                (Some(Value::Array(slots)), ArrayIndex::Const(i)) => slots
                    .get(*i)
                    .and_then(|s| s.clone())
                    .map(Value::Str)
                    .unwrap_or(Value::Unknown),
                _ => Value::Unknown,
            },
            IrExpr::Call(call) => self
                .exec_call(call, locals, method, index)
                .unwrap_or(Value::Unknown),
            IrExpr::Unknown => Value::Unknown,
        }
    }

    /// Executes a call with JVM-like semantics: builders mutate their
    /// receiver; `append` returns the receiver; internal methods run with
    /// bound parameters.
    fn exec_call(
        &mut self,
        call: &CallExpr,
        locals: &mut BTreeMap<String, Value>,
        method: &IrMethod,
        index: usize,
    ) -> Option<Value> {
        self.observe_api(call, locals, method, index);

        let owner = call.callee.owner.as_deref();
        let name = call.callee.name.as_str();
        let builder_owner = matches!(
            owner,
            Some("java.lang.StringBuilder") | Some("java.lang.StringBuffer")
        );

        if builder_owner && name == "<init>" {
            let init = call
                .args
                .first()
                .map(|a| self.eval(a, locals, method, index).as_str().unwrap_or_default())
                .unwrap_or_default();
            if let Some(recv) = &call.receiver {
                locals.insert(recv.clone(), Value::Builder(init));
            }
            return None;
        }
        if builder_owner && name == "append" {
            let arg = call
                .args
                .first()
                .map(|a| self.eval(a, locals, method, index))
                .and_then(|v| v.as_str());
            if let (Some(recv), Some(arg)) = (&call.receiver, arg) {
                if let Some(Value::Builder(buf)) = locals.get_mut(recv) {
                    buf.push_str(&arg);
                    let out = buf.clone();
                    return Some(Value::Builder(out));
                }
            }
            return Some(Value::Unknown);
        }
        if builder_owner && name == "toString" {
            let recv = call.receiver.as_ref()?;
            return match locals.get(recv) {
                Some(Value::Builder(buf)) => Some(Value::Str(buf.clone())),
                _ => Some(Value::Unknown),
            };
        }
        if owner == Some("java.lang.String") && name == "concat" {
            let recv = call.receiver.as_ref()?;
            let base = locals.get(recv).and_then(|v| v.as_str());
            let arg = call
                .args
                .first()
                .map(|a| self.eval(a, locals, method, index))
                .and_then(|v| v.as_str());
            return match (base, arg) {
                (Some(b), Some(a)) => Some(Value::Str(b + &a)),
                _ => Some(Value::Unknown),
            };
        }
        if owner == Some("java.lang.String") && name == "valueOf" {
            let arg = call.args.first()?;
            return Some(self.eval(arg, locals, method, index));
        }
        if name == "getProperty"
            && matches!(owner, Some("java.lang.System") | Some("java.util.Properties"))
        {
            let key = call
                .args
                .first()
                .map(|a| self.eval(a, locals, method, index))
                .and_then(|v| v.as_str())?;
            return Some(
                self.env
                    .get(&key)
                    .map(|v| Value::Str(v.clone()))
                    .unwrap_or(Value::Unknown),
            );
        }

        // Internal call?
        if let (Some(owner), Some(params)) = (owner, call.callee.param_types.as_deref()) {
            if let Some(callee) = self.app.find_method(owner, name, params) {
                let callee = callee.clone();
                let args: Vec<Value> = call
                    .args
                    .iter()
                    .map(|a| self.eval(a, locals, method, index))
                    .collect();
                return self.run_method(&callee, args);
            }
        }
        Some(Value::Unknown)
    }

    /// Exact signature matching, deliberately re-implemented here.
    fn observe_api(
        &mut self,
        call: &CallExpr,
        locals: &mut BTreeMap<String, Value>,
        method: &IrMethod,
        index: usize,
    ) {
        let Some(owner) = call.callee.owner.as_deref() else {
            return;
        };
        let Some(params) = call.callee.param_types.as_deref() else {
            return;
        };
        for sig in self.sigs {
            if sig.owner == owner && sig.method == call.callee.name && sig.params == params {
                for &p in &sig.secret_params {
                    let value = call
                        .args
                        .get(p)
                        .map(|a| self.eval(a, locals, method, index))
                        .and_then(|v| v.as_str());
                    self.observed.insert(
                        (
                            method.owner.clone(),
                            method.name.clone(),
                            index,
                            p,
                        ),
                        value,
                    );
                }
            }
        }
    }
}
