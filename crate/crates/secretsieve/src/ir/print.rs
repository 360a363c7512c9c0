//! Canonical pretty-printer for the IR. Re-parsing printed output yields a
//! structurally equal app, with string constants byte-identical.

use super::{
    ArrayIndex, CallExpr, InvokeKind, IrApp, IrClassUnit, IrExpr, IrStatement, StatementKind,
};
use std::fmt::Write;

pub(super) fn render_files(app: &IrApp) -> Vec<(String, String)> {
    // Preserve the original file layout when we have one; otherwise one
    // file per class.
    if !app.source_manifest.is_empty() {
        let mut out = Vec::new();
        for (path, names) in &app.source_manifest {
            let mut text = String::new();
            for name in names {
                if let Some(class) = app.find_class(name) {
                    text.push_str(&render_class(class));
                }
            }
            out.push((path.clone(), text));
        }
        return out;
    }
    app.classes
        .iter()
        .map(|c| (format!("{}.jir", c.qualified_name), render_class(c)))
        .collect()
}

pub(super) fn render_class(class: &IrClassUnit) -> String {
    let mut out = String::new();
    writeln!(out, "class {}", class.qualified_name).unwrap();
    for field in &class.static_fields {
        match &field.init {
            Some(value) => writeln!(
                out,
                "staticfield {} {} = \"{}\"",
                field.field_type,
                field.name,
                escape(value)
            )
            .unwrap(),
            None => writeln!(out, "staticfield {} {}", field.field_type, field.name).unwrap(),
        }
    }
    for method in &class.methods {
        writeln!(
            out,
            "method {} {}({}) {{",
            method.return_type,
            method.name,
            method.param_types.join(",")
        )
        .unwrap();
        for stmt in &method.body {
            writeln!(out, "  {}", render_statement(stmt)).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    out
}

pub(super) fn render_statement(stmt: &IrStatement) -> String {
    match &stmt.kind {
        StatementKind::Assign { lhs: None, rhs: _ } => "?".to_string(),
        StatementKind::Assign {
            lhs: Some(lhs),
            rhs,
        } => format!("{lhs} = {}", render_expr(rhs)),
        StatementKind::Invoke(call) => render_call(call),
        StatementKind::Return(None) => "return".to_string(),
        StatementKind::Return(Some(expr)) => format!("return {}", render_expr(expr)),
        StatementKind::FieldStore {
            owner,
            field_type,
            name,
            value,
        } => format!("<{owner}: {field_type} {name}> = {}", render_expr(value)),
        StatementKind::ArrayStore { base, index, value } => {
            format!("{base}[{}] = {}", render_index(index), render_expr(value))
        }
    }
}

fn render_index(index: &ArrayIndex) -> String {
    match index {
        ArrayIndex::Const(i) => i.to_string(),
        ArrayIndex::Local(name) => name.clone(),
    }
}

fn render_expr(expr: &IrExpr) -> String {
    match expr {
        IrExpr::StringConst(s) => format!("\"{}\"", escape(s)),
        IrExpr::LocalRef(name) => name.clone(),
        IrExpr::FieldRef {
            owner,
            field_type,
            name,
        } => format!("<{owner}: {field_type} {name}>"),
        IrExpr::Call(call) => render_call(call),
        IrExpr::NewArray { elem_type, length } => format!("newarray ({elem_type})[{length}]"),
        IrExpr::ArrayRef { base, index } => format!("{base}[{}]", render_index(index)),
        IrExpr::Unknown => "?".to_string(),
    }
}

fn render_call(call: &CallExpr) -> String {
    let args: Vec<String> = call.args.iter().map(render_expr).collect();
    let args = args.join(", ");
    match call.kind {
        InvokeKind::Shorthand => match &call.receiver {
            Some(recv) => format!("{recv}.{}({args})", call.callee.name),
            None => format!("{}({args})", call.callee.name),
        },
        kind => {
            let kw = match kind {
                InvokeKind::Virtual => "virtualinvoke",
                InvokeKind::Special => "specialinvoke",
                InvokeKind::Static => "staticinvoke",
                InvokeKind::Interface => "interfaceinvoke",
                InvokeKind::Shorthand => unreachable!(),
            };
            let sig = format!(
                "<{}: {} {}({})>",
                call.callee.owner.as_deref().unwrap_or("?"),
                call.callee.return_type.as_deref().unwrap_or("?"),
                call.callee.name,
                call.callee
                    .param_types
                    .as_deref()
                    .map(|p| p.join(","))
                    .unwrap_or_default()
            );
            match &call.receiver {
                Some(recv) => format!("{kw} {recv}.{sig}({args})"),
                None => format!("{kw} {sig}({args})"),
            }
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_app;

    const SAMPLE: &str = "class com.example.Main\nstaticfield java.lang.String KEY = \"AIza\\\"x\\\\y\"\nmethod void onCreate(android.content.Context,java.lang.String) {\n  $r0 = newarray (java.lang.String)[3]\n  $r0[0] = \"\"\n  $r0[1] = \"67\"\n  <jp.b: java.lang.String[] c> = $r0\n  r7.ggh(context, \"AIza------\")\n  totally not parseable @@@@\n  virtualinvoke $b.<java.lang.StringBuilder: java.lang.StringBuilder append(java.lang.String)>(\"SyAbc\")\n  return\n}\n";

    #[test]
    fn print_then_reparse_is_structurally_equal() {
        let app = parse_app("app", &[("m.jir".to_string(), SAMPLE.to_string())]).unwrap();
        let printed = app.render_files();
        let reparsed = parse_app("app", &printed).unwrap();
        assert_eq!(app, reparsed);
    }

    #[test]
    fn damage_marker_survives_round_trip() {
        let app = parse_app(
            "app",
            &[(
                "m.jir".to_string(),
                "class a.B\nmethod void m() {\n  ?\n  x = ?\n}\n".to_string(),
            )],
        )
        .unwrap();
        let printed = app.render_files();
        let reparsed = parse_app("app", &printed).unwrap();
        assert_eq!(app, reparsed);
    }
}
