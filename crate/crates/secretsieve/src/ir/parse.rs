//! Line-oriented parser for the textual IR.
//!
//! Class, staticfield, and method headers are strict: a malformed header is a
//! [`IrError::FileSyntax`] error. Statement lines inside a method body are
//! total: anything the statement grammar cannot express degrades to an
//! `Assign` with an `Unknown` right-hand side, salvaging the assignment
//! target when one parses.

use super::{
    ArrayIndex, CallExpr, CalleeSig, InvokeKind, IrApp, IrClassUnit, IrError, IrExpr, IrMethod,
    IrStatement, IrStaticField, StatementKind,
};
use std::collections::{BTreeMap, BTreeSet};

/// Parses one app from its IR files. Files may hold one or more class
/// blocks; class unit names must be unique across the whole app.
pub fn parse_app(app_id: &str, files: &[(String, String)]) -> Result<IrApp, IrError> {
    let mut classes: Vec<IrClassUnit> = Vec::new();
    let mut source_manifest: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut seen = BTreeSet::new();

    for (path, text) in files {
        let parsed = parse_file(path, text)?;
        let names: Vec<String> = parsed
            .iter()
            .map(|(c, _)| c.qualified_name.clone())
            .collect();
        for (class, line) in parsed {
            if !seen.insert(class.qualified_name.clone()) {
                return Err(IrError::FileSyntax {
                    path: path.clone(),
                    line,
                    msg: format!("duplicate class `{}`", class.qualified_name),
                });
            }
            classes.push(class);
        }
        source_manifest.insert(path.clone(), names.into_iter().collect());
    }

    // Canonical class order, so results never depend on file ordering.
    classes.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));

    Ok(IrApp {
        app_id: app_id.to_string(),
        classes,
        source_manifest,
    })
}

/// Parses every class block in one file, returning each with the line its
/// header appeared on.
fn parse_file(path: &str, text: &str) -> Result<Vec<(IrClassUnit, usize)>, IrError> {
    let mut classes = Vec::new();
    let mut current: Option<(IrClassUnit, usize)> = None;
    let mut lines = text.lines().enumerate().peekable();

    let err = |line: usize, msg: String| IrError::FileSyntax {
        path: path.to_string(),
        line: line + 1,
        msg,
    };

    while let Some((lineno, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if let Some(rest) = line.strip_prefix("class ") {
            let name = rest.trim();
            if name.is_empty() || !is_dotted_path(name) {
                return Err(err(lineno, format!("malformed class header `{line}`")));
            }
            if let Some((done, _)) = current.take() {
                classes.push((done, lineno));
            }
            current = Some((
                IrClassUnit {
                    qualified_name: name.to_string(),
                    static_fields: Vec::new(),
                    methods: Vec::new(),
                },
                lineno + 1,
            ));
            continue;
        }

        let class = match current.as_mut() {
            Some((c, _)) => c,
            None => return Err(err(lineno, format!("expected `class` header, got `{line}`"))),
        };

        if let Some(rest) = line.strip_prefix("staticfield ") {
            let field = parse_static_field(rest)
                .ok_or_else(|| err(lineno, format!("malformed staticfield `{line}`")))?;
            if class.static_fields.iter().any(|f| f.name == field.name) {
                return Err(err(lineno, format!("duplicate field `{}`", field.name)));
            }
            class.static_fields.push(field);
            continue;
        }

        if let Some(rest) = line.strip_prefix("method ") {
            let (ret, name, params) = parse_method_header(rest)
                .ok_or_else(|| err(lineno, format!("malformed method header `{line}`")))?;
            let mut body = Vec::new();
            let mut closed = false;
            for (_, raw) in lines.by_ref() {
                let stmt_line = raw.trim();
                if stmt_line == "}" {
                    closed = true;
                    break;
                }
                if stmt_line.is_empty() || stmt_line.starts_with('#') {
                    continue;
                }
                let kind = parse_statement(stmt_line);
                body.push(IrStatement {
                    index: body.len(),
                    kind,
                });
            }
            if !closed {
                return Err(err(lineno, format!("unterminated method `{name}`")));
            }
            let locals = collect_locals(&body);
            class.methods.push(IrMethod {
                owner: class.qualified_name.clone(),
                name,
                param_types: params,
                return_type: ret,
                body,
                locals,
            });
            continue;
        }

        return Err(err(lineno, format!("unexpected line `{line}`")));
    }

    if let Some((done, header_line)) = current.take() {
        classes.push((done, header_line));
    }
    Ok(classes)
}

fn parse_static_field(rest: &str) -> Option<IrStaticField> {
    // `<type> <name>` optionally followed by ` = "<const>"`
    let (decl, init) = match rest.split_once('=') {
        Some((decl, init_src)) => {
            let mut cur = Cursor::new(init_src.trim());
            let value = cur.string_literal()?;
            cur.skip_ws();
            if !cur.at_end() {
                return None;
            }
            (decl.trim(), Some(value))
        }
        None => (rest.trim(), None),
    };
    let (field_type, name) = decl.rsplit_once(' ')?;
    let field_type = field_type.trim();
    let name = name.trim();
    if field_type.is_empty() || !is_ident(name) || !is_type_name(field_type) {
        return None;
    }
    Some(IrStaticField {
        field_type: field_type.to_string(),
        name: name.to_string(),
        init,
    })
}

fn parse_method_header(rest: &str) -> Option<(String, String, Vec<String>)> {
    // `<ret> <name>(<types>) {`
    let rest = rest.trim().strip_suffix('{')?.trim_end();
    let open = rest.find('(')?;
    let close = rest.rfind(')')?;
    if close != rest.len() - 1 || close < open {
        return None;
    }
    let (ret, name) = rest[..open].trim().rsplit_once(' ')?;
    let ret = ret.trim();
    let name = name.trim();
    if !is_type_name(ret) || !is_method_name(name) {
        return None;
    }
    let params_src = rest[open + 1..close].trim();
    let params = parse_type_list(params_src)?;
    Some((ret.to_string(), name.to_string(), params))
}

fn parse_type_list(src: &str) -> Option<Vec<String>> {
    if src.is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for part in src.split(',') {
        let t = part.trim();
        if !is_type_name(t) {
            return None;
        }
        out.push(t.to_string());
    }
    Some(out)
}

/// Total statement parser: never fails, degrading to `Assign`/`Unknown`.
pub(super) fn parse_statement(line: &str) -> StatementKind {
    if let Some(kind) = try_parse_statement(line) {
        return kind;
    }
    // Salvage a plain local target so the damaged line keeps its shape.
    if let Some((lhs, _)) = line.split_once('=') {
        let lhs = lhs.trim();
        if is_local(lhs) {
            return StatementKind::Assign {
                lhs: Some(lhs.to_string()),
                rhs: IrExpr::Unknown,
            };
        }
        if let Some((base, index)) = try_array_target(lhs) {
            return StatementKind::ArrayStore {
                base,
                index,
                value: IrExpr::Unknown,
            };
        }
        if let Some((owner, field_type, name)) = try_field_sig(lhs) {
            return StatementKind::FieldStore {
                owner,
                field_type,
                name,
                value: IrExpr::Unknown,
            };
        }
    }
    StatementKind::Assign {
        lhs: None,
        rhs: IrExpr::Unknown,
    }
}

fn try_parse_statement(line: &str) -> Option<StatementKind> {
    let mut cur = Cursor::new(line);

    if cur.eat_keyword("return") {
        cur.skip_ws();
        if cur.at_end() {
            return Some(StatementKind::Return(None));
        }
        let value = cur.simple_expr()?;
        cur.skip_ws();
        if !cur.at_end() {
            return None;
        }
        return Some(StatementKind::Return(Some(value)));
    }

    // Field store: `<owner: type name> = expr`
    if cur.peek() == Some('<') {
        let (owner, field_type, name) = cur.field_sig()?;
        cur.skip_ws();
        cur.eat_char('=')?;
        cur.skip_ws();
        let value = cur.expr()?;
        cur.skip_ws();
        if !cur.at_end() {
            return None;
        }
        return Some(StatementKind::FieldStore {
            owner,
            field_type,
            name,
            value,
        });
    }

    // Bare invoke with an explicit kind keyword.
    if cur.peek_invoke_keyword().is_some() {
        let call = cur.invoke_expr()?;
        cur.skip_ws();
        if !cur.at_end() {
            return None;
        }
        return Some(StatementKind::Invoke(call));
    }

    let ident = cur.ident()?;
    match cur.peek() {
        Some('[') => {
            // Array store: `base[index] = expr`
            cur.eat_char('[')?;
            let index = cur.array_index()?;
            cur.eat_char(']')?;
            cur.skip_ws();
            cur.eat_char('=')?;
            cur.skip_ws();
            let value = cur.expr()?;
            cur.skip_ws();
            if !cur.at_end() {
                return None;
            }
            Some(StatementKind::ArrayStore {
                base: ident,
                index,
                value,
            })
        }
        Some('.') | Some('(') => {
            // Shorthand invoke used as a statement.
            let call = cur.shorthand_call_after_ident(ident)?;
            cur.skip_ws();
            if !cur.at_end() {
                return None;
            }
            Some(StatementKind::Invoke(call))
        }
        _ => {
            cur.skip_ws();
            cur.eat_char('=')?;
            cur.skip_ws();
            let rhs = cur.expr()?;
            cur.skip_ws();
            if !cur.at_end() {
                return None;
            }
            Some(StatementKind::Assign {
                lhs: Some(ident),
                rhs,
            })
        }
    }
}

fn try_array_target(src: &str) -> Option<(String, ArrayIndex)> {
    let mut cur = Cursor::new(src);
    let base = cur.ident()?;
    cur.eat_char('[')?;
    let index = cur.array_index()?;
    cur.eat_char(']')?;
    cur.skip_ws();
    if !cur.at_end() {
        return None;
    }
    Some((base, index))
}

fn try_field_sig(src: &str) -> Option<(String, String, String)> {
    let mut cur = Cursor::new(src.trim());
    let sig = cur.field_sig()?;
    cur.skip_ws();
    if !cur.at_end() {
        return None;
    }
    Some(sig)
}

fn collect_locals(body: &[IrStatement]) -> BTreeSet<String> {
    let mut locals = BTreeSet::new();
    let add_index = |locals: &mut BTreeSet<String>, index: &ArrayIndex| {
        if let ArrayIndex::Local(name) = index {
            locals.insert(name.clone());
        }
    };
    fn add_expr(locals: &mut BTreeSet<String>, expr: &IrExpr) {
        match expr {
            IrExpr::LocalRef(name) => {
                locals.insert(name.clone());
            }
            IrExpr::ArrayRef { base, index } => {
                locals.insert(base.clone());
                if let ArrayIndex::Local(name) = index {
                    locals.insert(name.clone());
                }
            }
            IrExpr::Call(call) => add_call(locals, call),
            _ => {}
        }
    }
    fn add_call(locals: &mut BTreeSet<String>, call: &CallExpr) {
        if let Some(recv) = &call.receiver {
            locals.insert(recv.clone());
        }
        for arg in &call.args {
            add_expr(locals, arg);
        }
    }
    for stmt in body {
        match &stmt.kind {
            StatementKind::Assign { lhs, rhs } => {
                if let Some(l) = lhs {
                    locals.insert(l.clone());
                }
                add_expr(&mut locals, rhs);
            }
            StatementKind::Invoke(call) => add_call(&mut locals, call),
            StatementKind::Return(Some(expr)) => add_expr(&mut locals, expr),
            StatementKind::Return(None) => {}
            StatementKind::FieldStore { value, .. } => add_expr(&mut locals, value),
            StatementKind::ArrayStore { base, index, value } => {
                locals.insert(base.clone());
                add_index(&mut locals, index);
                add_expr(&mut locals, value);
            }
        }
    }
    locals
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        && !s.chars().next().unwrap().is_ascii_digit()
}

fn is_local(s: &str) -> bool {
    is_ident(s)
}

/// `<init>` and `<clinit>` are valid method names alongside plain idents.
fn is_method_name(s: &str) -> bool {
    is_ident(s) || s == "<init>" || s == "<clinit>"
}

fn is_dotted_path(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_ident)
}

/// Dotted path with optional `[]` suffixes, e.g. `java.lang.String[]`.
fn is_type_name(s: &str) -> bool {
    let base = s.trim_end_matches("[]");
    is_dotted_path(base)
}

/// Minimal cursor over a statement line.
struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.rest().is_empty()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat_char(&mut self, c: char) -> Option<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Some(())
        } else {
            None
        }
    }

    /// Consumes `word` only when followed by a non-ident boundary.
    fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(rest) = self.rest().strip_prefix(word) {
            let boundary = rest
                .chars()
                .next()
                .is_none_or(|c| !(c.is_alphanumeric() || c == '_' || c == '$'));
            if boundary {
                self.pos += word.len();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> Option<String> {
        let rest = self.rest();
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = c.is_alphanumeric() || c == '_' || c == '$';
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return None;
        }
        let word = &rest[..len];
        if word.chars().next().unwrap().is_ascii_digit() {
            return None;
        }
        self.pos += len;
        Some(word.to_string())
    }

    fn integer(&mut self) -> Option<usize> {
        let rest = self.rest();
        let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return None;
        }
        let value = rest[..len].parse().ok()?;
        self.pos += len;
        Some(value)
    }

    /// Dotted path, optionally with `[]` suffixes (used for types).
    fn type_name(&mut self) -> Option<String> {
        let start = self.pos;
        self.ident()?;
        while self.peek() == Some('.') {
            self.pos += 1;
            self.ident()?;
        }
        while self.rest().starts_with("[]") {
            self.pos += 2;
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn string_literal(&mut self) -> Option<String> {
        self.eat_char('"')?;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        loop {
            let (i, c) = chars.next()?;
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Some(out);
                }
                '\\' => {
                    let (_, esc) = chars.next()?;
                    match esc {
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        _ => return None,
                    }
                }
                _ => out.push(c),
            }
        }
    }

    fn array_index(&mut self) -> Option<ArrayIndex> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return self.integer().map(ArrayIndex::Const);
        }
        self.ident().map(ArrayIndex::Local)
    }

    /// `<owner: type name>` (field) — distinguished from a callee signature
    /// by the absence of `(`.
    fn field_sig(&mut self) -> Option<(String, String, String)> {
        let save = self.pos;
        self.eat_char('<')?;
        let owner = self.type_name()?;
        self.eat_char(':')?;
        self.skip_ws();
        let field_type = self.type_name()?;
        self.skip_ws();
        let name = self.ident()?;
        if self.eat_char('>').is_none() {
            self.pos = save;
            return None;
        }
        Some((owner, field_type, name))
    }

    /// `<owner: ret name(types)>`
    fn callee_sig(&mut self) -> Option<CalleeSig> {
        self.eat_char('<')?;
        let owner = self.type_name()?;
        self.eat_char(':')?;
        self.skip_ws();
        let return_type = self.type_name()?;
        self.skip_ws();
        let name = if self.rest().starts_with("<init>") {
            self.pos += "<init>".len();
            "<init>".to_string()
        } else if self.rest().starts_with("<clinit>") {
            self.pos += "<clinit>".len();
            "<clinit>".to_string()
        } else {
            self.ident()?
        };
        self.eat_char('(')?;
        let close = self.rest().find(')')?;
        let params = parse_type_list(self.rest()[..close].trim())?;
        self.pos += close + 1;
        self.eat_char('>')?;
        Some(CalleeSig {
            owner: Some(owner),
            return_type: Some(return_type),
            name,
            param_types: Some(params),
        })
    }

    fn peek_invoke_keyword(&self) -> Option<InvokeKind> {
        for (word, kind) in [
            ("virtualinvoke", InvokeKind::Virtual),
            ("specialinvoke", InvokeKind::Special),
            ("staticinvoke", InvokeKind::Static),
            ("interfaceinvoke", InvokeKind::Interface),
        ] {
            if self.rest().starts_with(word) {
                let after = &self.rest()[word.len()..];
                if after.starts_with(' ') {
                    return Some(kind);
                }
            }
        }
        None
    }

    /// Full-form invocation: `kw [recv.]<sig>(args)`.
    fn invoke_expr(&mut self) -> Option<CallExpr> {
        let kind = self.peek_invoke_keyword()?;
        let word_len = self.rest().find(' ')?;
        self.pos += word_len + 1;
        self.skip_ws();

        let receiver = if kind == InvokeKind::Static {
            None
        } else {
            let recv = self.ident()?;
            self.eat_char('.')?;
            Some(recv)
        };
        let callee = self.callee_sig()?;
        let args = self.arg_list()?;
        Some(CallExpr {
            kind,
            receiver,
            callee,
            args,
        })
    }

    /// `recv.name(args)` or `name(args)` where `recv`/first ident was already
    /// consumed by the caller.
    fn shorthand_call_after_ident(&mut self, first: String) -> Option<CallExpr> {
        if self.eat_char('.').is_some() {
            let name = self.ident()?;
            let args = self.arg_list()?;
            Some(CallExpr {
                kind: InvokeKind::Shorthand,
                receiver: Some(first),
                callee: CalleeSig::shorthand(&name),
                args,
            })
        } else {
            let args = self.arg_list()?;
            Some(CallExpr {
                kind: InvokeKind::Shorthand,
                receiver: None,
                callee: CalleeSig::shorthand(&first),
                args,
            })
        }
    }

    fn arg_list(&mut self) -> Option<Vec<IrExpr>> {
        self.eat_char('(')?;
        self.skip_ws();
        let mut args = Vec::new();
        if self.eat_char(')').is_some() {
            return Some(args);
        }
        loop {
            args.push(self.simple_expr()?);
            self.skip_ws();
            if self.eat_char(',').is_some() {
                self.skip_ws();
                continue;
            }
            self.eat_char(')')?;
            return Some(args);
        }
    }

    /// Argument-position expression: string, local, array element, or field
    /// reference. Bare integers are tolerated as `Unknown`.
    fn simple_expr(&mut self) -> Option<IrExpr> {
        match self.peek()? {
            '"' => self.string_literal().map(IrExpr::StringConst),
            '<' => self
                .field_sig()
                .map(|(owner, field_type, name)| IrExpr::FieldRef {
                    owner,
                    field_type,
                    name,
                }),
            c if c.is_ascii_digit() => {
                self.integer()?;
                Some(IrExpr::Unknown)
            }
            _ => {
                let name = self.ident()?;
                if self.peek() == Some('[') {
                    self.eat_char('[')?;
                    let index = self.array_index()?;
                    self.eat_char(']')?;
                    Some(IrExpr::ArrayRef { base: name, index })
                } else {
                    Some(IrExpr::LocalRef(name))
                }
            }
        }
    }

    /// Full right-hand-side expression.
    fn expr(&mut self) -> Option<IrExpr> {
        if self.rest() == "?" {
            self.pos += 1;
            return Some(IrExpr::Unknown);
        }
        if self.eat_keyword("newarray") {
            self.skip_ws();
            self.eat_char('(')?;
            let elem_type = self.type_name()?;
            self.eat_char(')')?;
            self.eat_char('[')?;
            let length = self.integer()?;
            self.eat_char(']')?;
            return Some(IrExpr::NewArray { elem_type, length });
        }
        if self.peek_invoke_keyword().is_some() {
            return self.invoke_expr().map(IrExpr::Call);
        }
        match self.peek()? {
            '"' | '<' => self.simple_expr(),
            c if c.is_ascii_digit() => {
                self.integer()?;
                Some(IrExpr::Unknown)
            }
            _ => {
                let name = self.ident()?;
                match self.peek() {
                    Some('[') => {
                        self.eat_char('[')?;
                        let index = self.array_index()?;
                        self.eat_char(']')?;
                        Some(IrExpr::ArrayRef { base: name, index })
                    }
                    Some('.') | Some('(') => {
                        self.shorthand_call_after_ident(name).map(IrExpr::Call)
                    }
                    _ => Some(IrExpr::LocalRef(name)),
                }
            }
        }
    }
}
