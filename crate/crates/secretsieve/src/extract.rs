//! String-constant extraction and per-method string groups.
//!
//! Every string constant in a method body and every static-field initializer
//! yields exactly one [`StringOccurrence`], in deterministic order (class,
//! then fields, then methods, then statement order, left to right within a
//! statement). Duplicates are preserved; deduplication happens downstream.

use crate::ir::{ArrayIndex, CallExpr, IrApp, IrExpr, IrMethod, StatementKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    MethodBody,
    StaticField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringOccurrence {
    pub value: String,
    pub app_id: String,
    pub class_name: String,
    /// Absent for static-field initializers.
    pub method_name: Option<String>,
    pub statement_index: Option<usize>,
    pub origin: Origin,
}

/// The multiset of string literals inside one method, in statement order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringGroup {
    pub app_id: String,
    pub class_name: String,
    /// `name(paramtypes)` so overloads stay distinct.
    pub method_name: String,
    pub strings: Vec<String>,
}

pub fn extract_occurrences(app: &IrApp) -> Vec<StringOccurrence> {
    let mut out = Vec::new();
    for class in &app.classes {
        for field in &class.static_fields {
            if let Some(value) = &field.init {
                out.push(StringOccurrence {
                    value: value.clone(),
                    app_id: app.app_id.clone(),
                    class_name: class.qualified_name.clone(),
                    method_name: None,
                    statement_index: None,
                    origin: Origin::StaticField,
                });
            }
        }
        for method in &class.methods {
            let display = method_display(method);
            for stmt in &method.body {
                for value in statement_strings(&stmt.kind) {
                    out.push(StringOccurrence {
                        value,
                        app_id: app.app_id.clone(),
                        class_name: class.qualified_name.clone(),
                        method_name: Some(display.clone()),
                        statement_index: Some(stmt.index),
                        origin: Origin::MethodBody,
                    });
                }
            }
        }
    }
    out
}

/// One group per method holding at least `min_size` string constants.
pub fn build_string_groups(app: &IrApp, min_size: usize) -> Vec<StringGroup> {
    let mut out = Vec::new();
    for class in &app.classes {
        for method in &class.methods {
            let strings = method_strings(method);
            if strings.len() >= min_size.max(1) {
                out.push(StringGroup {
                    app_id: app.app_id.clone(),
                    class_name: class.qualified_name.clone(),
                    method_name: method_display(method),
                    strings,
                });
            }
        }
    }
    out
}

pub fn method_strings(method: &IrMethod) -> Vec<String> {
    let mut strings = Vec::new();
    for stmt in &method.body {
        strings.extend(statement_strings(&stmt.kind));
    }
    strings
}

pub fn method_display(method: &IrMethod) -> String {
    format!("{}({})", method.name, method.param_types.join(","))
}

fn statement_strings(kind: &StatementKind) -> Vec<String> {
    let mut out = Vec::new();
    match kind {
        StatementKind::Assign { rhs, .. } => expr_strings(rhs, &mut out),
        StatementKind::Invoke(call) => call_strings(call, &mut out),
        StatementKind::Return(Some(expr)) => expr_strings(expr, &mut out),
        StatementKind::Return(None) => {}
        StatementKind::FieldStore { value, .. } => expr_strings(value, &mut out),
        StatementKind::ArrayStore { index: _, value, .. } => expr_strings(value, &mut out),
    }
    out
}

fn expr_strings(expr: &IrExpr, out: &mut Vec<String>) {
    match expr {
        IrExpr::StringConst(s) => out.push(s.clone()),
        IrExpr::Call(call) => call_strings(call, out),
        IrExpr::ArrayRef {
            index: ArrayIndex::Local(_),
            ..
        }
        | IrExpr::ArrayRef { .. }
        | IrExpr::LocalRef(_)
        | IrExpr::FieldRef { .. }
        | IrExpr::NewArray { .. }
        | IrExpr::Unknown => {}
    }
}

fn call_strings(call: &CallExpr, out: &mut Vec<String>) {
    for arg in &call.args {
        expr_strings(arg, out);
    }
}

/// CSV dump of occurrences (`app_id,class,method,index,value`, RFC 4180).
pub fn occurrences_to_csv(occurrences: &[StringOccurrence]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["app_id", "class", "method", "index", "value"])?;
    for occ in occurrences {
        w.write_record([
            occ.app_id.as_str(),
            occ.class_name.as_str(),
            occ.method_name.as_deref().unwrap_or(""),
            &occ
                .statement_index
                .map(|i| i.to_string())
                .unwrap_or_default(),
            occ.value.as_str(),
        ])?;
    }
    w.into_inner()
        .map_err(|e| csv::Error::from(std::io::Error::other(e.to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_app;

    fn app(text: &str) -> IrApp {
        parse_app("app", &[("a.jir".to_string(), text.to_string())]).unwrap()
    }

    #[test]
    fn listing_one_yields_the_key_occurrence() {
        let app = app("class a.B\nmethod void m() {\n  r7.ggh(context, \"AIza------\")\n}\n");
        let occs = extract_occurrences(&app);
        assert!(occs.iter().any(|o| o.value == "AIza------"));
    }

    #[test]
    fn app_without_strings_yields_nothing() {
        let app = app("class a.B\nmethod void m() {\n  return\n}\n");
        assert!(extract_occurrences(&app).is_empty());
    }

    #[test]
    fn array_assembly_keeps_duplicates_in_statement_order() {
        let app = app(
            "class jp.b\nmethod void fill() {\n  $r0 = newarray (java.lang.String)[3]\n  $r0[0] = \"\"\n  $r0[1] = \"67\"\n  $r0[2] = \"\"\n  <jp.b: java.lang.String[] c> = $r0\n}\n",
        );
        let values: Vec<String> = extract_occurrences(&app)
            .into_iter()
            .map(|o| o.value)
            .collect();
        assert_eq!(values, vec!["".to_string(), "67".to_string(), "".to_string()]);
    }

    #[test]
    fn static_field_initializers_are_occurrences_but_not_group_members() {
        let app = app(
            "class a.B\nstaticfield java.lang.String K = \"seekrit\"\nmethod void m() {\n  $s = \"one\"\n  $t = \"two\"\n}\n",
        );
        let occs = extract_occurrences(&app);
        assert_eq!(occs.len(), 3);
        assert_eq!(occs[0].origin, Origin::StaticField);
        assert_eq!(occs[0].method_name, None);

        let groups = build_string_groups(&app, 1);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].strings, vec!["one", "two"]);
    }

    #[test]
    fn group_preserves_repeats_and_respects_min_size() {
        let app = app(
            "class a.B\nmethod void tok() {\n  $a = \"grant_type\"\n  $b = \"refresh_token\"\n  $c = \"client_id\"\n  $d = \"client_secret\"\n  $e = \"refresh_token\"\n}\nmethod void single() {\n  $a = \"alone\"\n}\n",
        );
        let groups = build_string_groups(&app, 2);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].strings.len(), 5);
        assert_eq!(
            groups[0]
                .strings
                .iter()
                .filter(|s| *s == "refresh_token")
                .count(),
            2
        );
    }

    #[test]
    fn min_size_one_still_excludes_empty_methods() {
        let app = app("class a.B\nmethod void m() {\n  return\n}\n");
        assert!(build_string_groups(&app, 1).is_empty());
    }

    #[test]
    fn group_sizes_sum_to_method_body_occurrences() {
        let app = app(
            "class a.B\nstaticfield java.lang.String K = \"f\"\nmethod void m() {\n  $a = \"x\"\n  r0.go(\"y\", \"z\")\n}\nmethod void n() {\n  $b = \"w\"\n}\n",
        );
        let groups = build_string_groups(&app, 1);
        let group_total: usize = groups.iter().map(|g| g.strings.len()).sum();
        let body_total = extract_occurrences(&app)
            .iter()
            .filter(|o| o.origin == Origin::MethodBody)
            .count();
        assert_eq!(group_total, body_total);
        assert_eq!(group_total, 4);
    }
}
