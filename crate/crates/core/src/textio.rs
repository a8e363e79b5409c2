//! Line-based text format, plus DOT and JSON export.
//!
//! ```text
//! kind tsr
//! system medication
//! actions prescribe sign give
//! states s0 s1 s2
//! initial s0
//! responses s1 : give
//! trans s0 prescribe s1
//! ```
//!
//! `#` starts a comment. Names are `[A-Za-z_][A-Za-z0-9_]*` or a double-quoted
//! string with `\"` and `\\` escapes. Mixed systems use `may` and `must`
//! lines instead of `trans` and have no `responses`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    ActionId, ActionTable, MixTs, MixTsBuilder, ModelError, Modality, StateId, StateTable, Tsr, TsrBuilder,
};

pub mod fixtures;

/// 1-based position in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A value with its source position. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }

    /// A value that did not come from text.
    pub fn synthetic(value: T) -> Self {
        Spanned {
            value,
            span: Span::default(),
        }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

type Name = Spanned<String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DocKind {
    Tsr,
    MixTs,
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocKind::Tsr => "tsr",
            DocKind::MixTs => "mixts",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Trans,
    May,
    Must,
}

impl EdgeKind {
    fn keyword(self) -> &'static str {
        match self {
            EdgeKind::Trans => "trans",
            EdgeKind::May => "may",
            EdgeKind::Must => "must",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseDecl {
    pub state: Name,
    pub actions: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub kind: EdgeKind,
    pub source: Name,
    pub action: Name,
    pub target: Name,
}

/// A parsed but not yet validated system description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDoc {
    pub kind: DocKind,
    pub name: Name,
    pub actions: Vec<Name>,
    pub states: Vec<Name>,
    /// Every `initial` line; validation requires exactly one.
    pub initial: Vec<Name>,
    pub responses: Vec<ResponseDecl>,
    pub edges: Vec<EdgeDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{}{error}", span.map(|s| format!("{s}: ")).unwrap_or_default())]
    Invalid { error: ModelError, span: Option<Span> },
    #[error("expected a {expected} system, found {found}")]
    WrongKind { expected: DocKind, found: DocKind },
}

fn invalid(error: ModelError, span: Span) -> TextError {
    TextError::Invalid {
        error,
        span: (span != Span::default()).then_some(span),
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Bare(String),
    Quoted(String),
    Colon,
}

fn is_bare(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Token, Span)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |column: usize, message: String| ParseError {
        line: line_no,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span {
            line: line_no,
            column: i + 1,
        };
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == ':' {
            tokens.push((Token::Colon, span));
            i += 1;
        } else if c == '"' {
            let mut value = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(span.column, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            value.push(e);
                            i += 2;
                        }
                        _ => return Err(err(i + 1, "invalid escape in string".into())),
                    },
                    Some(&other) => {
                        value.push(other);
                        i += 1;
                    }
                }
            }
            tokens.push((Token::Quoted(value), span));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push((Token::Bare(chars[start..i].iter().collect()), span));
        } else {
            return Err(err(span.column, format!("unexpected character `{c}`")));
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parsing

struct LineParser {
    line: usize,
    tokens: Vec<(Token, Span)>,
}

impl LineParser {
    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |(_, s)| s.column + 1)
    }

    fn name_at(&self, i: usize) -> Result<Name, ParseError> {
        match self.tokens.get(i) {
            Some((Token::Bare(v) | Token::Quoted(v), span)) => Ok(Spanned::new(v.clone(), *span)),
            Some((Token::Colon, span)) => Err(self.error(span.column, "expected a name, found `:`")),
            None => Err(self.error(self.end_column(), "expected a name")),
        }
    }

    fn names_from(&self, i: usize) -> Result<Vec<Name>, ParseError> {
        (i..self.tokens.len()).map(|j| self.name_at(j)).collect()
    }

    fn exactly(&self, keyword: &str, count: usize) -> Result<Vec<Name>, ParseError> {
        let found = self.tokens.len() - 1;
        if found != count {
            let column = if found > count {
                self.tokens[count + 1].1.column
            } else {
                self.end_column()
            };
            return Err(self.error(column, format!("`{keyword}` expects {count} name(s), found {found}")));
        }
        self.names_from(1)
    }

    fn at_least_one(&self, keyword: &str) -> Result<Vec<Name>, ParseError> {
        if self.tokens.len() < 2 {
            return Err(self.error(self.end_column(), format!("`{keyword}` expects at least one name")));
        }
        self.names_from(1)
    }
}

/// Parses the text format into a [`SystemDoc`] without validating names.
pub fn parse(text: &str) -> Result<SystemDoc, ParseError> {
    let mut kind: Option<DocKind> = None;
    let mut doc: Option<SystemDoc> = None;
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let tokens = tokenize(raw, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let p = LineParser { line: line_no, tokens };
        let (keyword, kw_span) = match &p.tokens[0] {
            (Token::Bare(k), span) => (k.as_str(), *span),
            (_, span) => return Err(p.error(span.column, "expected a keyword")),
        };
        let Some(kind_now) = kind else {
            if keyword != "kind" {
                return Err(p.error(kw_span.column, "expected `kind tsr` or `kind mixts`"));
            }
            let value = p.exactly("kind", 1)?.remove(0);
            kind = Some(match value.value.as_str() {
                "tsr" => DocKind::Tsr,
                "mixts" => DocKind::MixTs,
                other => return Err(p.error(value.span.column, format!("unknown kind `{other}`"))),
            });
            continue;
        };
        let Some(doc) = doc.as_mut() else {
            if keyword != "system" {
                return Err(p.error(kw_span.column, "expected `system NAME`"));
            }
            let name = p.exactly("system", 1)?.remove(0);
            doc = Some(SystemDoc {
                kind: kind_now,
                name,
                actions: Vec::new(),
                states: Vec::new(),
                initial: Vec::new(),
                responses: Vec::new(),
                edges: Vec::new(),
            });
            continue;
        };
        let edge_kind = match keyword {
            "trans" => Some(EdgeKind::Trans),
            "may" => Some(EdgeKind::May),
            "must" => Some(EdgeKind::Must),
            _ => None,
        };
        match (keyword, edge_kind) {
            ("actions", _) => doc.actions.extend(p.at_least_one("actions")?),
            ("states", _) => doc.states.extend(p.at_least_one("states")?),
            ("initial", _) => doc.initial.push(p.exactly("initial", 1)?.remove(0)),
            ("responses", _) => {
                if kind_now != DocKind::Tsr {
                    return Err(p.error(kw_span.column, "`responses` is only allowed in tsr files"));
                }
                let state = p.name_at(1)?;
                match p.tokens.get(2) {
                    Some((Token::Colon, _)) => {}
                    Some((_, span)) => return Err(p.error(span.column, "expected `:`")),
                    None => return Err(p.error(p.end_column(), "expected `:`")),
                }
                let actions = p.names_from(3)?;
                doc.responses.push(ResponseDecl { state, actions });
            }
            (_, Some(edge)) => {
                let allowed = match kind_now {
                    DocKind::Tsr => edge == EdgeKind::Trans,
                    DocKind::MixTs => edge != EdgeKind::Trans,
                };
                if !allowed {
                    return Err(p.error(kw_span.column, format!("`{keyword}` is not allowed in {kind_now} files")));
                }
                let mut names = p.exactly(keyword, 3)?.into_iter();
                let (source, action, target) = (
                    names.next().expect("three names"),
                    names.next().expect("three names"),
                    names.next().expect("three names"),
                );
                doc.edges.push(EdgeDecl {
                    kind: edge,
                    source,
                    action,
                    target,
                });
            }
            ("kind", _) | ("system", _) => {
                return Err(p.error(kw_span.column, format!("`{keyword}` may appear only once")))
            }
            (other, _) => return Err(p.error(kw_span.column, format!("unknown keyword `{other}`"))),
        }
    }
    let line = text.lines().count().max(1);
    doc.ok_or_else(|| ParseError {
        line,
        column: 1,
        message: if kind.is_none() {
            "missing `kind` line".into()
        } else {
            "missing `system` line".into()
        },
    })
}

// ---------------------------------------------------------------------------
// Validation

fn symbol_table<I: crate::model::DenseId>(what: &'static str, names: &[Name]) -> Result<crate::model::SymbolTable<I>, TextError> {
    let mut table = crate::model::SymbolTable::new();
    for name in names {
        if table.insert(name.value.clone()).is_none() {
            return Err(invalid(
                ModelError::DuplicateName {
                    what,
                    name: name.value.clone(),
                },
                name.span,
            ));
        }
    }
    Ok(table)
}

fn resolve<I: crate::model::DenseId>(
    table: &crate::model::SymbolTable<I>,
    what: &'static str,
    name: &Name,
) -> Result<I, TextError> {
    table.get(&name.value).ok_or_else(|| {
        invalid(
            ModelError::UndeclaredName {
                what,
                name: name.value.clone(),
            },
            name.span,
        )
    })
}

struct Header {
    actions: ActionTable,
    states: StateTable,
    initial: StateId,
}

fn header(doc: &SystemDoc, expected: DocKind) -> Result<Header, TextError> {
    if doc.kind != expected {
        return Err(TextError::WrongKind {
            expected,
            found: doc.kind,
        });
    }
    let actions: ActionTable = symbol_table("action", &doc.actions)?;
    let states: StateTable = symbol_table("state", &doc.states)?;
    let initial = match doc.initial.as_slice() {
        [] => return Err(invalid(ModelError::MissingInitial, doc.name.span)),
        [one] => resolve(&states, "state", one)?,
        [_, second, ..] => return Err(invalid(ModelError::DuplicateInitial, second.span)),
    };
    Ok(Header {
        actions,
        states,
        initial,
    })
}

fn state_names(states: &StateTable) -> Vec<String> {
    states.names().to_vec()
}

pub fn validate_tsr(doc: &SystemDoc) -> Result<Tsr, TextError> {
    let h = header(doc, DocKind::Tsr)?;
    let mut builder = TsrBuilder::new(doc.name.value.clone(), h.actions.clone(), state_names(&h.states), h.initial)
        .map_err(|e| invalid(e, doc.name.span))?;
    for decl in &doc.responses {
        let s = resolve(&h.states, "state", &decl.state)?;
        for a in &decl.actions {
            let id = resolve(&h.actions, "action", a)?;
            builder.response(s, id).map_err(|e| invalid(e, a.span))?;
        }
    }
    for edge in &doc.edges {
        let (s, a, t) = resolve_edge(&h, edge)?;
        builder.transition(s, a, t).map_err(|e| invalid(e, edge.source.span))?;
    }
    Ok(builder.build())
}

pub fn validate_mixts(doc: &SystemDoc) -> Result<MixTs, TextError> {
    let h = header(doc, DocKind::MixTs)?;
    let mut builder = MixTsBuilder::new(doc.name.value.clone(), h.actions.clone(), state_names(&h.states), h.initial)
        .map_err(|e| invalid(e, doc.name.span))?;
    for edge in &doc.edges {
        let modality = match edge.kind {
            EdgeKind::Must => Modality::Must,
            _ => Modality::May,
        };
        let (s, a, t) = resolve_edge(&h, edge)?;
        builder.edge(modality, s, a, t).map_err(|e| invalid(e, edge.source.span))?;
    }
    Ok(builder.build())
}

fn resolve_edge(h: &Header, edge: &EdgeDecl) -> Result<(StateId, ActionId, StateId), TextError> {
    Ok((
        resolve(&h.states, "state", &edge.source)?,
        resolve(&h.actions, "action", &edge.action)?,
        resolve(&h.states, "state", &edge.target)?,
    ))
}

/// Either kind of validated system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum System {
    Tsr(Tsr),
    MixTs(MixTs),
}

impl System {
    pub fn kind(&self) -> DocKind {
        match self {
            System::Tsr(_) => DocKind::Tsr,
            System::MixTs(_) => DocKind::MixTs,
        }
    }

    pub fn to_doc(&self) -> SystemDoc {
        match self {
            System::Tsr(t) => tsr_doc(t),
            System::MixTs(m) => mixts_doc(m),
        }
    }

    pub fn to_text(&self) -> String {
        serialize(&self.to_doc())
    }

    pub fn to_dot(&self) -> String {
        match self {
            System::Tsr(t) => export_dot_tsr(t),
            System::MixTs(m) => export_dot_mixts(m),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            System::Tsr(t) => export_json_tsr(t),
            System::MixTs(m) => export_json_mixts(m),
        }
    }
}

pub fn validate(doc: &SystemDoc) -> Result<System, TextError> {
    match doc.kind {
        DocKind::Tsr => validate_tsr(doc).map(System::Tsr),
        DocKind::MixTs => validate_mixts(doc).map(System::MixTs),
    }
}

/// Parse and validate.
pub fn load(text: &str) -> Result<System, TextError> {
    validate(&parse(text)?)
}

pub fn load_tsr(text: &str) -> Result<Tsr, TextError> {
    validate_tsr(&parse(text)?)
}

pub fn load_mixts(text: &str) -> Result<MixTs, TextError> {
    validate_mixts(&parse(text)?)
}

// ---------------------------------------------------------------------------
// Serialization

fn synthetic_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Vec<Name> {
    names.into_iter().map(|n| Spanned::synthetic(n.to_string())).collect()
}

fn header_doc(kind: DocKind, name: &str, actions: &ActionTable, states: &StateTable, initial: StateId) -> SystemDoc {
    SystemDoc {
        kind,
        name: Spanned::synthetic(name.to_string()),
        actions: synthetic_names(actions.names().iter().map(String::as_str)),
        states: synthetic_names(states.names().iter().map(String::as_str)),
        initial: synthetic_names([states.name(initial)]),
        responses: Vec::new(),
        edges: Vec::new(),
    }
}

fn edge_decl(kind: EdgeKind, source: &str, action: &str, target: &str) -> EdgeDecl {
    EdgeDecl {
        kind,
        source: Spanned::synthetic(source.to_string()),
        action: Spanned::synthetic(action.to_string()),
        target: Spanned::synthetic(target.to_string()),
    }
}

/// Canonical document of a TSR.
pub fn tsr_doc(t: &Tsr) -> SystemDoc {
    let mut doc = header_doc(DocKind::Tsr, t.name(), t.actions(), t.states(), t.initial());
    for s in t.state_ids() {
        if !t.responses(s).is_empty() {
            doc.responses.push(ResponseDecl {
                state: Spanned::synthetic(t.state_name(s).to_string()),
                actions: synthetic_names(t.responses(s).iter().map(|&a| t.actions().name(a))),
            });
        }
    }
    for (s, a, d) in t.transitions() {
        doc.edges.push(edge_decl(
            EdgeKind::Trans,
            t.state_name(s),
            t.actions().name(a),
            t.state_name(d),
        ));
    }
    canonical(&doc)
}

/// Canonical document of a mixed system.
pub fn mixts_doc(m: &MixTs) -> SystemDoc {
    let mut doc = header_doc(DocKind::MixTs, m.name(), m.actions(), m.states(), m.initial());
    for (kind, modality) in [(EdgeKind::May, Modality::May), (EdgeKind::Must, Modality::Must)] {
        for (s, a, d) in m.transitions(modality) {
            doc.edges.push(edge_decl(kind, m.state_name(s), m.actions().name(a), m.state_name(d)));
        }
    }
    canonical(&doc)
}

/// Reorders a document into canonical form: one `actions` and one `states`
/// line in declaration order, response lines merged per state in state
/// order with actions sorted by name, edges grouped by kind and sorted by
/// (source in state order, action name).
pub fn canonical(doc: &SystemDoc) -> SystemDoc {
    let order: BTreeMap<&str, usize> = doc
        .states
        .iter()
        .enumerate()
        .rev()
        .map(|(i, s)| (s.value.as_str(), i))
        .collect();
    let rank = |name: &str| (order.get(name).copied().unwrap_or(usize::MAX), name.to_string());

    let mut merged: BTreeMap<(usize, String), (Name, Vec<Name>)> = BTreeMap::new();
    for decl in &doc.responses {
        let entry = merged
            .entry(rank(&decl.state.value))
            .or_insert_with(|| (decl.state.clone(), Vec::new()));
        entry.1.extend(decl.actions.iter().cloned());
    }
    let responses = merged
        .into_values()
        .filter_map(|(state, mut actions)| {
            actions.sort_by(|a, b| a.value.cmp(&b.value));
            actions.dedup();
            (!actions.is_empty()).then_some(ResponseDecl { state, actions })
        })
        .collect();

    let mut edges = doc.edges.clone();
    edges.sort_by_cached_key(|e| (e.kind, rank(&e.source.value), e.action.value.clone()));

    SystemDoc {
        kind: doc.kind,
        name: doc.name.clone(),
        actions: doc.actions.clone(),
        states: doc.states.clone(),
        initial: doc.initial.clone(),
        responses,
        edges,
    }
}

/// Writes a name bare when possible, quoted otherwise.
pub fn format_name(name: &str) -> String {
    if is_bare(name) {
        name.to_string()
    } else {
        let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}

fn join_names(names: &[Name]) -> String {
    names.iter().map(|n| format_name(&n.value)).collect::<Vec<_>>().join(" ")
}

/// Canonical text of a document.
pub fn serialize(doc: &SystemDoc) -> String {
    let doc = canonical(doc);
    let mut out = String::new();
    let _ = writeln!(out, "kind {}", doc.kind);
    let _ = writeln!(out, "system {}", format_name(&doc.name.value));
    if !doc.actions.is_empty() {
        let _ = writeln!(out, "actions {}", join_names(&doc.actions));
    }
    if !doc.states.is_empty() {
        let _ = writeln!(out, "states {}", join_names(&doc.states));
    }
    for init in &doc.initial {
        let _ = writeln!(out, "initial {}", format_name(&init.value));
    }
    for decl in &doc.responses {
        let _ = writeln!(
            out,
            "responses {} : {}",
            format_name(&decl.state.value),
            join_names(&decl.actions)
        );
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            e.kind.keyword(),
            format_name(&e.source.value),
            format_name(&e.action.value),
            format_name(&e.target.value)
        );
    }
    out
}

pub fn tsr_to_text(t: &Tsr) -> String {
    serialize(&tsr_doc(t))
}

pub fn mixts_to_text(m: &MixTs) -> String {
    serialize(&mixts_doc(m))
}

// ---------------------------------------------------------------------------
// DOT

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot_header(out: &mut String, name: &str, states: &StateTable, initial: StateId) {
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle];");
    let _ = writeln!(out, "  __start [shape=point];");
    let _ = writeln!(out, "  __start -> \"{}\";", dot_escape(states.name(initial)));
}

/// Response sets appear as `□{...}` under the state name.
pub fn export_dot_tsr(t: &Tsr) -> String {
    let mut out = String::new();
    dot_header(&mut out, t.name(), t.states(), t.initial());
    for s in t.state_ids() {
        let name = dot_escape(t.state_name(s));
        let responses = t.responses(s);
        if responses.is_empty() {
            let _ = writeln!(out, "  \"{name}\" [label=\"{name}\"];");
        } else {
            let mut actions: Vec<&str> = responses.iter().map(|&a| t.actions().name(a)).collect();
            actions.sort_unstable();
            let _ = writeln!(
                out,
                "  \"{name}\" [label=\"{name}\\n□{{{}}}\"];",
                dot_escape(&actions.join(", "))
            );
        }
    }
    for (s, a, d) in t.transitions() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(t.state_name(s)),
            dot_escape(t.state_name(d)),
            dot_escape(t.actions().name(a))
        );
    }
    out.push_str("}\n");
    out
}

/// Must edges are solid, may edges dashed.
pub fn export_dot_mixts(m: &MixTs) -> String {
    let mut out = String::new();
    dot_header(&mut out, m.name(), m.states(), m.initial());
    for s in m.state_ids() {
        let name = dot_escape(m.state_name(s));
        let _ = writeln!(out, "  \"{name}\" [label=\"{name}\"];");
    }
    for (modality, style) in [(Modality::Must, "solid"), (Modality::May, "dashed")] {
        for (s, a, d) in m.transitions(modality) {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", style={style}];",
                dot_escape(m.state_name(s)),
                dot_escape(m.state_name(d)),
                dot_escape(m.actions().name(a))
            );
        }
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize)]
struct JsonEdge<'a> {
    source: &'a str,
    action: &'a str,
    target: &'a str,
}

#[derive(Serialize)]
struct JsonTsr<'a> {
    kind: DocKind,
    name: &'a str,
    actions: &'a [String],
    states: &'a [String],
    initial: &'a str,
    responses: BTreeMap<&'a str, Vec<&'a str>>,
    delta: Vec<JsonEdge<'a>>,
}

#[derive(Serialize)]
struct JsonMixTs<'a> {
    kind: DocKind,
    name: &'a str,
    actions: &'a [String],
    states: &'a [String],
    initial: &'a str,
    may: Vec<JsonEdge<'a>>,
    must: Vec<JsonEdge<'a>>,
}

pub fn export_json_tsr(t: &Tsr) -> String {
    let view = JsonTsr {
        kind: DocKind::Tsr,
        name: t.name(),
        actions: t.actions().names(),
        states: t.states().names(),
        initial: t.state_name(t.initial()),
        responses: t
            .state_ids()
            .map(|s| {
                let actions = t.responses(s).iter().map(|&a| t.actions().name(a)).collect();
                (t.state_name(s), actions)
            })
            .collect(),
        delta: t
            .transitions()
            .map(|(s, a, d)| JsonEdge {
                source: t.state_name(s),
                action: t.actions().name(a),
                target: t.state_name(d),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&view).expect("plain data serializes")
}

pub fn export_json_mixts(m: &MixTs) -> String {
    let edges = |modality| {
        m.transitions(modality)
            .map(|(s, a, d)| JsonEdge {
                source: m.state_name(s),
                action: m.actions().name(a),
                target: m.state_name(d),
            })
            .collect()
    };
    let view = JsonMixTs {
        kind: DocKind::MixTs,
        name: m.name(),
        actions: m.actions().names(),
        states: m.states().names(),
        initial: m.state_name(m.initial()),
        may: edges(Modality::May),
        must: edges(Modality::Must),
    };
    serde_json::to_string_pretty(&view).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = parse("kind tsr\nsystem x\nstates s0\ninitial s0").unwrap();
        let t = validate_tsr(&doc).unwrap();
        assert_eq!(t.states().len(), 1);
        assert!(t.actions().is_empty());
    }

    #[test]
    fn short_trans_line_is_a_parse_error() {
        let err = parse("kind tsr\nsystem x\nstates s0\ninitial s0\ntrans s0 a\n").unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("expects 3"), "{err}");
    }

    #[test]
    fn duplicate_transition_reports_position() {
        let text = "kind tsr\nsystem x\nactions a\nstates s0 s1 s2\ninitial s0\ntrans s0 a s1\ntrans s0 a s2\n";
        let err = load_tsr(text).unwrap_err();
        assert_eq!(
            err,
            TextError::Invalid {
                error: ModelError::DuplicateTransition {
                    state: "s0".into(),
                    action: "a".into()
                },
                span: Some(Span { line: 7, column: 7 }),
            }
        );
    }

    #[test]
    fn validation_errors() {
        let missing = load_tsr("kind tsr\nsystem x\nstates s0\n").unwrap_err();
        assert!(matches!(missing, TextError::Invalid { error: ModelError::MissingInitial, .. }));
        let undeclared = load_tsr("kind tsr\nsystem x\nstates s0\ninitial s0\nresponses s0 : go\n").unwrap_err();
        assert!(matches!(
            undeclared,
            TextError::Invalid {
                error: ModelError::UndeclaredName { what: "action", .. },
                span: Some(Span { line: 5, column: 16 })
            }
        ));
        let twice = load_tsr("kind tsr\nsystem x\nstates s0\ninitial s0\ninitial s0\n").unwrap_err();
        assert!(matches!(twice, TextError::Invalid { error: ModelError::DuplicateInitial, .. }));
        let wrong = load_mixts("kind tsr\nsystem x\nstates s0\ninitial s0\n").unwrap_err();
        assert!(matches!(wrong, TextError::WrongKind { .. }));
    }

    #[test]
    fn kind_specific_lines() {
        assert!(parse("kind tsr\nsystem x\nmay s a t\n").is_err());
        assert!(parse("kind mixts\nsystem x\ntrans s a t\n").is_err());
        assert!(parse("kind mixts\nsystem x\nresponses s : a\n").is_err());
        assert!(parse("system x\n").is_err());
        assert!(parse("kind tsr\n").is_err());
        assert!(parse("kind dfa\nsystem x\n").is_err());
        assert!(parse("kind tsr\nsystem x\nwibble\n").is_err());
    }

    #[test]
    fn quoted_names_and_comments() {
        let text = r#"kind tsr   # header
system "med flow"
actions "don't trust" sign # trailing
states s0 "s #1"
initial s0
responses s0 : "don't trust"
trans s0 "don't trust" "s #1"
"#;
        let t = load_tsr(text).unwrap();
        assert_eq!(t.name(), "med flow");
        assert_eq!(t.actions().names()[0], "don't trust");
        assert_eq!(t.states().names()[1], "s #1");
        let again = load_tsr(&tsr_to_text(&t)).unwrap();
        assert_eq!(again, t);
        assert!(tsr_to_text(&t).contains("\"don't trust\""));
    }

    #[test]
    fn escapes_in_quoted_names() {
        let t = load_tsr("kind tsr\nsystem \"a\\\"b\\\\c\"\nstates s0\ninitial s0\n").unwrap();
        assert_eq!(t.name(), "a\"b\\c");
        assert_eq!(load_tsr(&tsr_to_text(&t)).unwrap(), t);
        assert!(parse("kind tsr\nsystem \"abc\n").is_err());
        assert!(parse("kind tsr\nsystem \"a\\nb\"\n").is_err());
    }

    #[test]
    fn colon_without_space() {
        let t = load_tsr("kind tsr\nsystem x\nactions a\nstates s0\ninitial s0\nresponses s0: a\n").unwrap();
        assert_eq!(t.responses(StateId(0)).len(), 1);
    }

    #[test]
    fn serialization_is_canonical_and_idempotent() {
        let text = "kind tsr\nsystem x\nactions b a\nstates s1\nstates s0\ninitial s0\n\
                    trans s1 b s0\ntrans s0 b s1\ntrans s0 a s0\nresponses s1 : b\nresponses s0 : b a\n";
        let once = serialize(&parse(text).unwrap());
        assert_eq!(
            once,
            "kind tsr\nsystem x\nactions b a\nstates s1 s0\ninitial s0\nresponses s1 : b\nresponses s0 : a b\n\
             trans s1 b s0\ntrans s0 a s0\ntrans s0 b s1\n"
        );
        assert_eq!(serialize(&parse(&once).unwrap()), once);
    }

    #[test]
    fn fixture_documents_roundtrip() {
        for text in [fixtures::T_A, fixtures::T_B, fixtures::T_C, fixtures::M_MED] {
            let system = load(text).unwrap();
            let doc = system.to_doc();
            assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
            assert_eq!(load(&system.to_text()).unwrap(), system);
        }
    }

    #[test]
    fn dot_styles() {
        let dot = export_dot_tsr(&fixtures::t_b());
        assert!(dot.contains("\"s1\" [label=\"s1\\n□{give, sign}\"];"), "{dot}");
        assert!(dot.contains("__start -> \"s0\""));
        let dot = export_dot_mixts(&fixtures::m_med());
        assert!(dot.contains("\"s1\" -> \"s5\" [label=\"give\", style=solid];"), "{dot}");
        assert!(dot.contains("\"s1\" -> \"s2\" [label=\"sign\", style=dashed];"), "{dot}");
    }

    #[test]
    fn json_mirrors_structure() {
        let v: serde_json::Value = serde_json::from_str(&export_json_tsr(&fixtures::t_c())).unwrap();
        assert_eq!(v["kind"], "tsr");
        assert_eq!(v["initial"], "s0");
        assert_eq!(v["responses"]["s1"][0], "give");
        assert_eq!(v["delta"][0]["action"], "prescribe");
        let v: serde_json::Value = serde_json::from_str(&export_json_mixts(&fixtures::m_med())).unwrap();
        assert_eq!(v["kind"], "mixts");
        assert_eq!(v["must"].as_array().unwrap().len(), 3);
        assert_eq!(v["may"].as_array().unwrap().len(), 9);
    }
}
