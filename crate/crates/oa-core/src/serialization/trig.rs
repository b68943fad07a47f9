//! Triple-graph emission and the TriG/Turtle exchange syntax.
//!
//! [`to_graph`] lowers an annotation to RDF: annotation triples in the
//! default graph, each embedded graph body as its own named graph. The
//! writers produce stable bytes (canonical blank labels, sorted triples, the
//! `oa:` prefix and nothing else); the readers accept exactly that flavor of
//! TriG/Turtle, which is all a round trip needs.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

use crate::iri::Iri;
use crate::model::{
    validate, Agent, Annotation, DcmiType, EmbeddedContent, Motivation, ResourceRef, Selector,
    State, SvgShape, Violation,
};
use crate::serialization::graph::{
    canonical_labels, map_triple, Literal, Object, Subject, Triple, TripleGraph,
};
use crate::serialization::vocab::{
    VocabularyConfig, CNT_NS, DCTERMS_NS, DCTYPES_NS, DC_NS, FOAF_NS, OA_NS, RDF_TYPE, RDF_VALUE,
    XSD_DATETIME, XSD_NON_NEGATIVE_INTEGER,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("annotation is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAnnotation(Vec<Violation>),
    #[error("named graphs cannot be written as turtle")]
    NamedGraphInTurtle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}: {message}")]
pub struct TrigParseError {
    pub line: usize,
    pub message: String,
}

fn iri(s: impl AsRef<str>) -> Iri {
    Iri::new(s.as_ref()).expect("well-formed vocabulary iri")
}

/// Blank labels counted up as `b0, b1, ...`, skipping any label that an
/// embedded graph body already uses (blank scope is the whole output file).
struct BlankAlloc {
    next: usize,
    taken: BTreeSet<String>,
}

impl BlankAlloc {
    fn new(taken: BTreeSet<String>) -> BlankAlloc {
        BlankAlloc { next: 0, taken }
    }

    fn fresh(&mut self) -> String {
        loop {
            let candidate = format!("b{}", self.next);
            self.next += 1;
            if !self.taken.contains(&candidate) {
                return candidate;
            }
        }
    }
}

fn percent_encode(label: &str) -> String {
    let mut out = String::new();
    for b in label.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => {
                out.push(b as char)
            }
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

fn dcmi_iri(dcmi: &DcmiType) -> Iri {
    match dcmi {
        DcmiType::Other(label) => Iri::new(label)
            .unwrap_or_else(|_| iri(format!("{DCTYPES_NS}{}", percent_encode(label)))),
        known => iri(format!("{DCTYPES_NS}{}", known.label())),
    }
}

fn xsd_datetime(ts: DateTime<Utc>) -> Literal {
    Literal::typed(
        ts.to_rfc3339_opts(SecondsFormat::AutoSi, true),
        iri(XSD_DATETIME),
    )
}

fn svg_markup(shape: &SvgShape) -> String {
    match shape {
        SvgShape::Circle { cx, cy, r } => format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\"><circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\"/></svg>"
        ),
        SvgShape::Rect { x, y, w, h } => format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\"><rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\"/></svg>"
        ),
        SvgShape::Polygon { vertices } => {
            let points: Vec<String> = vertices.iter().map(|(x, y)| format!("{x},{y}")).collect();
            format!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\"><polygon points=\"{}\"/></svg>",
                points.join(" ")
            )
        }
    }
}

struct GraphBuilder {
    cfg: VocabularyConfig,
    default: TripleGraph,
    named: Vec<TripleGraph>,
    alloc: BlankAlloc,
    unnamed_graphs: usize,
}

impl GraphBuilder {
    fn push(&mut self, s: Subject, p: Iri, o: impl Into<Object>) {
        self.default.insert(Triple::new(s, p, o));
    }

    fn term(&self, local: &str) -> Iri {
        self.cfg.term(local)
    }

    fn content(&mut self, node: &Subject, content: &EmbeddedContent) {
        self.push(
            node.clone(),
            iri(RDF_TYPE),
            iri(format!("{CNT_NS}ContentAsText")),
        );
        self.push(
            node.clone(),
            iri(format!("{CNT_NS}chars")),
            Literal::simple(content.text.clone()),
        );
        self.push(
            node.clone(),
            iri(format!("{DC_NS}format")),
            Literal::simple(content.effective_media_type()),
        );
        if let Some(lang) = &content.language {
            self.push(
                node.clone(),
                iri(format!("{DC_NS}language")),
                Literal::simple(lang.clone()),
            );
        }
    }

    fn selector(&mut self, node: &Subject, selector: &Selector) {
        match selector {
            Selector::TextPosition { start, end } => {
                self.push(
                    node.clone(),
                    iri(RDF_TYPE),
                    self.term("TextPositionSelector"),
                );
                self.push(
                    node.clone(),
                    self.term("start"),
                    Literal::typed(start.to_string(), iri(XSD_NON_NEGATIVE_INTEGER)),
                );
                self.push(
                    node.clone(),
                    self.term("end"),
                    Literal::typed(end.to_string(), iri(XSD_NON_NEGATIVE_INTEGER)),
                );
            }
            Selector::TextQuote {
                exact,
                prefix,
                suffix,
            } => {
                self.push(node.clone(), iri(RDF_TYPE), self.term("TextQuoteSelector"));
                self.push(
                    node.clone(),
                    self.term("exact"),
                    Literal::simple(exact.clone()),
                );
                if let Some(p) = prefix {
                    self.push(
                        node.clone(),
                        self.term("prefix"),
                        Literal::simple(p.clone()),
                    );
                }
                if let Some(s) = suffix {
                    self.push(
                        node.clone(),
                        self.term("suffix"),
                        Literal::simple(s.clone()),
                    );
                }
            }
            Selector::Fragment { value, conforms_to } => {
                self.push(node.clone(), iri(RDF_TYPE), self.term("FragmentSelector"));
                self.push(node.clone(), iri(RDF_VALUE), Literal::simple(value.clone()));
                if let Some(c) = conforms_to {
                    self.push(
                        node.clone(),
                        iri(format!("{DCTERMS_NS}conformsTo")),
                        c.clone(),
                    );
                }
            }
            Selector::SvgArea { shape } => {
                self.push(node.clone(), iri(RDF_TYPE), self.term("SvgSelector"));
                self.push(
                    node.clone(),
                    iri(RDF_VALUE),
                    Literal::simple(svg_markup(shape)),
                );
            }
        }
    }

    fn state(&mut self, node: &Subject, state: &State) {
        match state {
            State::HttpRequest { headers } => {
                self.push(node.clone(), iri(RDF_TYPE), self.term("HttpRequestState"));
                let mut lines = String::new();
                for (name, value) in headers {
                    lines.push_str(name);
                    lines.push_str(": ");
                    lines.push_str(value);
                    lines.push_str("\r\n");
                }
                self.push(node.clone(), iri(RDF_VALUE), Literal::simple(lines));
            }
            State::Time { source_date } => {
                self.push(node.clone(), iri(RDF_TYPE), self.term("TimeState"));
                self.push(
                    node.clone(),
                    self.term("sourceDate"),
                    xsd_datetime(*source_date),
                );
            }
        }
    }

    /// Emits the triples for one body or target and returns the term the
    /// annotation should reference it by.
    fn resource(&mut self, resource: &ResourceRef) -> Object {
        match resource {
            ResourceRef::External { iri: r, dcmi } => {
                if let Some(d) = dcmi {
                    self.push(Subject::Iri(r.clone()), iri(RDF_TYPE), dcmi_iri(d));
                }
                Object::Iri(r.clone())
            }
            ResourceRef::Embedded { content, dcmi } => {
                let node = Subject::Blank(self.alloc.fresh());
                self.content(&node, content);
                if let Some(d) = dcmi {
                    self.push(node.clone(), iri(RDF_TYPE), dcmi_iri(d));
                }
                let Subject::Blank(label) = node else {
                    unreachable!()
                };
                Object::Blank(label)
            }
            ResourceRef::SemanticTag { concept } => {
                self.push(
                    Subject::Iri(concept.clone()),
                    iri(RDF_TYPE),
                    self.term("SemanticTag"),
                );
                Object::Iri(concept.clone())
            }
            ResourceRef::Graph { graph } => {
                let name = graph.name.clone().unwrap_or_else(|| {
                    let n = self.unnamed_graphs;
                    self.unnamed_graphs += 1;
                    iri(format!("urn:oa-graph:{n}"))
                });
                self.push(
                    Subject::Iri(name.clone()),
                    iri(RDF_TYPE),
                    self.cfg.graph_type_iri.clone(),
                );
                self.named.push(TripleGraph {
                    name: Some(name.clone()),
                    triples: graph.triples.clone(),
                });
                Object::Iri(name)
            }
            ResourceRef::Specific { spec, dcmi } => {
                let node = Subject::Blank(self.alloc.fresh());
                self.push(node.clone(), iri(RDF_TYPE), self.term("SpecificResource"));
                if let Some(d) = dcmi {
                    self.push(node.clone(), iri(RDF_TYPE), dcmi_iri(d));
                }
                self.push(node.clone(), self.term("hasSource"), spec.source.clone());
                if let Some(selector) = &spec.selector {
                    let sel = Subject::Blank(self.alloc.fresh());
                    let Subject::Blank(label) = &sel else {
                        unreachable!()
                    };
                    self.push(
                        node.clone(),
                        self.term("hasSelector"),
                        Object::Blank(label.clone()),
                    );
                    self.selector(&sel, selector);
                }
                if let Some(state) = &spec.state {
                    let st = Subject::Blank(self.alloc.fresh());
                    let Subject::Blank(label) = &st else {
                        unreachable!()
                    };
                    self.push(
                        node.clone(),
                        self.term("hasState"),
                        Object::Blank(label.clone()),
                    );
                    self.state(&st, state);
                }
                if let Some(class) = &spec.style_class {
                    self.push(
                        node.clone(),
                        self.term("styleClass"),
                        Literal::simple(class.clone()),
                    );
                }
                let Subject::Blank(label) = node else {
                    unreachable!()
                };
                Object::Blank(label)
            }
        }
    }

    fn agent(&mut self, agent: &Agent) -> Object {
        let (subject, reference) = match &agent.id {
            Some(id) => (Subject::Iri(id.clone()), Object::Iri(id.clone())),
            None => {
                let label = self.alloc.fresh();
                (Subject::Blank(label.clone()), Object::Blank(label))
            }
        };
        if let Some(name) = &agent.name {
            self.push(
                subject,
                iri(format!("{FOAF_NS}name")),
                Literal::simple(name.clone()),
            );
        }
        reference
    }
}

/// Lowers a valid annotation to RDF. The first element is the default
/// graph; one named graph follows per `Graph` body (unnamed bodies get
/// minted `urn:oa-graph:{n}` names, in body order).
pub fn to_graph(a: &Annotation, cfg: &VocabularyConfig) -> Result<Vec<TripleGraph>, GraphError> {
    let report = validate(a);
    if !report.is_empty() {
        return Err(GraphError::InvalidAnnotation(report.into_violations()));
    }

    let mut taken = BTreeSet::new();
    for r in a.bodies.iter().chain(&a.targets) {
        if let ResourceRef::Graph { graph } = r {
            for t in &graph.triples {
                if let Subject::Blank(l) = &t.subject {
                    taken.insert(l.clone());
                }
                if let Object::Blank(l) = &t.object {
                    taken.insert(l.clone());
                }
            }
        }
    }
    let mut b = GraphBuilder {
        cfg: cfg.clone(),
        default: TripleGraph::new(),
        named: Vec::new(),
        alloc: BlankAlloc::new(taken),
        unnamed_graphs: 0,
    };

    let ann = match &a.id {
        Some(id) => Subject::Iri(id.clone()),
        None => Subject::Blank(b.alloc.fresh()),
    };
    b.push(ann.clone(), iri(RDF_TYPE), b.term("Annotation"));
    if let Some(motivation) = &a.motivation {
        let m = match motivation {
            Motivation::Extension(iri) => iri.clone(),
            named => b.term(named.name().expect("closed motivation has a name")),
        };
        b.push(ann.clone(), b.term("motivatedBy"), m);
    }
    for body in &a.bodies {
        let o = b.resource(body);
        b.push(ann.clone(), b.term("hasBody"), o);
    }
    for target in &a.targets {
        let o = b.resource(target);
        b.push(ann.clone(), b.term("hasTarget"), o);
    }
    if let Some(agent) = &a.provenance.annotated_by {
        let o = b.agent(agent);
        b.push(ann.clone(), b.term("annotatedBy"), o);
    }
    if let Some(ts) = a.provenance.annotated_at {
        b.push(ann.clone(), b.term("annotatedAt"), xsd_datetime(ts));
    }
    if let Some(agent) = &a.provenance.serialized_by {
        let o = b.agent(agent);
        b.push(ann.clone(), b.term("serializedBy"), o);
    }
    if let Some(ts) = a.provenance.serialized_at {
        b.push(ann.clone(), b.term("serializedAt"), xsd_datetime(ts));
    }
    if let Some(style) = &a.style {
        let node = Subject::Blank(b.alloc.fresh());
        let Subject::Blank(label) = &node else {
            unreachable!()
        };
        b.push(
            ann.clone(),
            b.term("styledBy"),
            Object::Blank(label.clone()),
        );
        b.push(node.clone(), iri(RDF_TYPE), b.term("Style"));
        b.content(&node, &style.styled_by);
        if let Some(class) = &style.style_class {
            b.push(
                node.clone(),
                b.term("styleClass"),
                Literal::simple(class.clone()),
            );
        }
    }

    let mut out = vec![b.default];
    out.extend(b.named);
    Ok(out)
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                out.push_str(&format!("\\u{:04X}", c as u32))
            }
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn iri_ref(i: &Iri) -> String {
    if let Some(local) = i.as_str().strip_prefix(OA_NS) {
        let mut chars = local.chars();
        if chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && local.chars().all(|c| c.is_ascii_alphanumeric())
        {
            return format!("oa:{local}");
        }
    }
    format!("<{}>", escape_iri(i.as_str()))
}

fn triple_line(t: &Triple) -> String {
    let s = match &t.subject {
        Subject::Iri(i) => iri_ref(i),
        Subject::Blank(l) => format!("_:{l}"),
    };
    let p = if t.predicate.as_str() == RDF_TYPE {
        "a".to_string()
    } else {
        iri_ref(&t.predicate)
    };
    let o = match &t.object {
        Object::Iri(i) => iri_ref(i),
        Object::Blank(l) => format!("_:{l}"),
        Object::Literal(lit) => {
            let mut s = format!("\"{}\"", escape_literal(lit.lexical()));
            if let Some(dt) = lit.datatype() {
                s.push_str("^^");
                s.push_str(&iri_ref(dt));
            } else if let Some(lang) = lit.language() {
                s.push('@');
                s.push_str(lang);
            }
            s
        }
    };
    format!("{s} {p} {o} .")
}

fn canonical_dataset(
    graphs: &[TripleGraph],
) -> (BTreeSet<Triple>, BTreeMap<Iri, BTreeSet<Triple>>) {
    let mapping = canonical_labels(graphs);
    let mut default = BTreeSet::new();
    let mut named: BTreeMap<Iri, BTreeSet<Triple>> = BTreeMap::new();
    for g in graphs {
        let bucket = match &g.name {
            None => &mut default,
            Some(name) => named.entry(name.clone()).or_default(),
        };
        for t in &g.triples {
            bucket.insert(map_triple(t, &mapping));
        }
    }
    named.retain(|_, ts| !ts.is_empty());
    (default, named)
}

/// Writes a graph set as TriG: default-graph triples as plain statements,
/// then one `<name> { ... }` block per named graph. Output is stable:
/// canonical blank labels, triples sorted by subject, predicate, object.
pub fn write_trig(graphs: &[TripleGraph]) -> String {
    let (default, named) = canonical_dataset(graphs);
    let mut out = format!("@prefix oa: <{OA_NS}> .\n");
    if !default.is_empty() {
        out.push('\n');
        for t in &default {
            out.push_str(&triple_line(t));
            out.push('\n');
        }
    }
    for (name, triples) in &named {
        out.push('\n');
        out.push_str(&format!("{} {{\n", iri_ref(name)));
        for t in triples {
            out.push_str("  ");
            out.push_str(&triple_line(t));
            out.push('\n');
        }
        out.push_str("}\n");
    }
    out
}

/// Writes a single unnamed graph as Turtle.
pub fn write_turtle(graph: &TripleGraph) -> Result<String, GraphError> {
    if graph.name.is_some() {
        return Err(GraphError::NamedGraphInTurtle);
    }
    let (default, _) = canonical_dataset(std::slice::from_ref(graph));
    let mut out = format!("@prefix oa: <{OA_NS}> .\n");
    if !default.is_empty() {
        out.push('\n');
        for t in &default {
            out.push_str(&triple_line(t));
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    Blank(String),
    PName(String, String),
    Str(String),
    LangTag(String),
    A,
    Dot,
    OpenBrace,
    CloseBrace,
    Caret,
    Prefix,
    Eof,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    peeked: Option<Token>,
}

impl Lexer {
    fn new(text: &str) -> Lexer {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            peeked: None,
        }
    }

    fn err(&self, message: impl Into<String>) -> TrigParseError {
        TrigParseError {
            line: self.line,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied();
        if let Some(c) = c {
            self.pos += 1;
            if c == '\n' {
                self.line += 1;
            }
        }
        c
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn unescape_into(&mut self, out: &mut String, iri_mode: bool) -> Result<(), TrigParseError> {
        match self.bump() {
            Some('u') => {
                let mut code = 0u32;
                for _ in 0..4 {
                    let d = self
                        .bump()
                        .and_then(|c| c.to_digit(16))
                        .ok_or_else(|| self.err("bad \\u escape"))?;
                    code = code * 16 + d;
                }
                out.push(char::from_u32(code).ok_or_else(|| self.err("bad \\u escape"))?);
            }
            Some('U') => {
                let mut code = 0u32;
                for _ in 0..8 {
                    let d = self
                        .bump()
                        .and_then(|c| c.to_digit(16))
                        .ok_or_else(|| self.err("bad \\U escape"))?;
                    code = code * 16 + d;
                }
                out.push(char::from_u32(code).ok_or_else(|| self.err("bad \\U escape"))?);
            }
            Some(c) if !iri_mode => match c {
                '\\' => out.push('\\'),
                '"' => out.push('"'),
                'n' => out.push('\n'),
                'r' => out.push('\r'),
                't' => out.push('\t'),
                other => return Err(self.err(format!("unknown escape \\{other}"))),
            },
            Some(other) => return Err(self.err(format!("unknown iri escape \\{other}"))),
            None => return Err(self.err("unterminated escape")),
        }
        Ok(())
    }

    fn name_char(c: char, allow_dot: bool) -> bool {
        c.is_alphanumeric() || c == '_' || c == '-' || (allow_dot && c == '.')
    }

    fn next_token(&mut self) -> Result<Token, TrigParseError> {
        if let Some(t) = self.peeked.take() {
            return Ok(t);
        }
        self.skip_trivia();
        let Some(c) = self.peek_char() else {
            return Ok(Token::Eof);
        };
        match c {
            '<' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some('\\') => self.unescape_into(&mut s, true)?,
                        Some(c) => s.push(c),
                        None => return Err(self.err("unterminated iri")),
                    }
                }
                Ok(Token::Iri(s))
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => self.unescape_into(&mut s, false)?,
                        Some(c) => s.push(c),
                        None => return Err(self.err("unterminated string")),
                    }
                }
                Ok(Token::Str(s))
            }
            '_' => {
                self.bump();
                if self.bump() != Some(':') {
                    return Err(self.err("expected ':' after '_'"));
                }
                let mut label = String::new();
                while self.peek_char().is_some_and(|c| Self::name_char(c, false)) {
                    label.push(self.bump().expect("peeked"));
                }
                if label.is_empty() {
                    return Err(self.err("empty blank node label"));
                }
                Ok(Token::Blank(label))
            }
            '{' => {
                self.bump();
                Ok(Token::OpenBrace)
            }
            '}' => {
                self.bump();
                Ok(Token::CloseBrace)
            }
            '.' => {
                self.bump();
                Ok(Token::Dot)
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err("expected '^^'"));
                }
                Ok(Token::Caret)
            }
            '@' => {
                self.bump();
                let mut word = String::new();
                while self
                    .peek_char()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
                {
                    word.push(self.bump().expect("peeked"));
                }
                if word == "prefix" {
                    Ok(Token::Prefix)
                } else if !word.is_empty() {
                    Ok(Token::LangTag(word))
                } else {
                    Err(self.err("bare '@'"))
                }
            }
            c if c.is_alphabetic() => {
                let mut word = String::new();
                while self.peek_char().is_some_and(|c| Self::name_char(c, false)) {
                    word.push(self.bump().expect("peeked"));
                }
                if self.peek_char() == Some(':') {
                    self.bump();
                    let mut local = String::new();
                    while self.peek_char().is_some_and(|c| Self::name_char(c, false)) {
                        local.push(self.bump().expect("peeked"));
                    }
                    Ok(Token::PName(word, local))
                } else if word == "a" {
                    Ok(Token::A)
                } else {
                    Err(self.err(format!("unexpected word {word:?}")))
                }
            }
            ':' => {
                self.bump();
                let mut local = String::new();
                while self.peek_char().is_some_and(|c| Self::name_char(c, false)) {
                    local.push(self.bump().expect("peeked"));
                }
                Ok(Token::PName(String::new(), local))
            }
            other => Err(self.err(format!("unexpected character {other:?}"))),
        }
    }

    fn peek_token(&mut self) -> Result<&Token, TrigParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.next_token()?);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }
}

struct Parser {
    lexer: Lexer,
    prefixes: BTreeMap<String, String>,
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            lexer: Lexer::new(text),
            prefixes: BTreeMap::new(),
        }
    }

    fn resolve(&self, prefix: &str, local: &str) -> Result<Iri, TrigParseError> {
        let ns = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| self.lexer.err(format!("unknown prefix {prefix:?}")))?;
        Iri::new(format!("{ns}{local}"))
            .map_err(|e| self.lexer.err(format!("bad prefixed iri: {e}")))
    }

    fn parse_iri(&self, s: &str) -> Result<Iri, TrigParseError> {
        Iri::new(s).map_err(|e| self.lexer.err(format!("bad iri {s:?}: {e}")))
    }

    fn subject(&mut self, tok: Token) -> Result<Subject, TrigParseError> {
        match tok {
            Token::Iri(s) => Ok(Subject::Iri(self.parse_iri(&s)?)),
            Token::PName(p, l) => Ok(Subject::Iri(self.resolve(&p, &l)?)),
            Token::Blank(l) => Ok(Subject::Blank(l)),
            other => Err(self.lexer.err(format!("expected subject, got {other:?}"))),
        }
    }

    fn predicate(&mut self) -> Result<Iri, TrigParseError> {
        match self.lexer.next_token()? {
            Token::A => Ok(iri(RDF_TYPE)),
            Token::Iri(s) => self.parse_iri(&s),
            Token::PName(p, l) => self.resolve(&p, &l),
            other => Err(self.lexer.err(format!("expected predicate, got {other:?}"))),
        }
    }

    fn object(&mut self) -> Result<Object, TrigParseError> {
        match self.lexer.next_token()? {
            Token::Iri(s) => Ok(Object::Iri(self.parse_iri(&s)?)),
            Token::PName(p, l) => Ok(Object::Iri(self.resolve(&p, &l)?)),
            Token::Blank(l) => Ok(Object::Blank(l)),
            Token::Str(s) => match self.lexer.peek_token()? {
                Token::Caret => {
                    self.lexer.next_token()?;
                    let dt = match self.lexer.next_token()? {
                        Token::Iri(i) => self.parse_iri(&i)?,
                        Token::PName(p, l) => self.resolve(&p, &l)?,
                        other => {
                            return Err(self.lexer.err(format!("expected datatype, got {other:?}")))
                        }
                    };
                    Ok(Object::Literal(Literal::typed(s, dt)))
                }
                Token::LangTag(_) => {
                    let Token::LangTag(tag) = self.lexer.next_token()? else {
                        unreachable!()
                    };
                    Ok(Object::Literal(Literal::lang(s, tag)))
                }
                _ => Ok(Object::Literal(Literal::simple(s))),
            },
            other => Err(self.lexer.err(format!("expected object, got {other:?}"))),
        }
    }

    fn expect_dot(&mut self) -> Result<(), TrigParseError> {
        match self.lexer.next_token()? {
            Token::Dot => Ok(()),
            other => Err(self.lexer.err(format!("expected '.', got {other:?}"))),
        }
    }

    fn statement_rest(
        &mut self,
        subject: Subject,
        graph: &mut TripleGraph,
    ) -> Result<(), TrigParseError> {
        let predicate = self.predicate()?;
        let object = self.object()?;
        self.expect_dot()?;
        graph.insert(Triple::new(subject, predicate, object));
        Ok(())
    }

    fn parse(&mut self, allow_named: bool) -> Result<Vec<TripleGraph>, TrigParseError> {
        let mut default = TripleGraph::new();
        let mut named: Vec<TripleGraph> = Vec::new();
        loop {
            match self.lexer.next_token()? {
                Token::Eof => break,
                Token::Prefix => {
                    let Token::PName(prefix, local) = self.lexer.next_token()? else {
                        return Err(self.lexer.err("expected prefix name"));
                    };
                    if !local.is_empty() {
                        return Err(self.lexer.err("prefix name must end with ':'"));
                    }
                    let Token::Iri(ns) = self.lexer.next_token()? else {
                        return Err(self.lexer.err("expected namespace iri"));
                    };
                    self.expect_dot()?;
                    self.prefixes.insert(prefix, ns);
                }
                tok @ (Token::Iri(_) | Token::PName(_, _) | Token::Blank(_)) => {
                    let term = self.subject(tok)?;
                    if matches!(self.lexer.peek_token()?, Token::OpenBrace) {
                        if !allow_named {
                            return Err(self.lexer.err("named graphs are not allowed in turtle"));
                        }
                        let Subject::Iri(name) = term else {
                            return Err(self.lexer.err("graph name must be an iri"));
                        };
                        self.lexer.next_token()?;
                        let mut graph = TripleGraph::named(name);
                        loop {
                            match self.lexer.next_token()? {
                                Token::CloseBrace => break,
                                tok @ (Token::Iri(_) | Token::PName(_, _) | Token::Blank(_)) => {
                                    let subject = self.subject(tok)?;
                                    self.statement_rest(subject, &mut graph)?;
                                }
                                other => {
                                    return Err(self
                                        .lexer
                                        .err(format!("expected statement or '}}', got {other:?}")))
                                }
                            }
                        }
                        named.push(graph);
                    } else {
                        self.statement_rest(term, &mut default)?;
                    }
                }
                other => return Err(self.lexer.err(format!("unexpected {other:?}"))),
            }
        }
        let mut out = vec![default];
        out.extend(named);
        Ok(out)
    }
}

/// Reads the TriG subset the writer emits (flat statements, `@prefix`
/// directives, named graph blocks). The first returned graph is the default
/// graph, possibly empty.
pub fn parse_trig(text: &str) -> Result<Vec<TripleGraph>, TrigParseError> {
    Parser::new(text).parse(true)
}

/// Reads the Turtle subset the writer emits. Named graph syntax is an error.
pub fn parse_turtle(text: &str) -> Result<TripleGraph, TrigParseError> {
    let graphs = Parser::new(text).parse(false)?;
    Ok(graphs
        .into_iter()
        .next()
        .expect("default graph is always present"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{new_annotation, Provenance};
    use crate::serialization::graph::graphs_isomorphic;

    fn cfg() -> VocabularyConfig {
        VocabularyConfig::default()
    }

    fn external(s: &str) -> ResourceRef {
        ResourceRef::external(iri(s))
    }

    #[test]
    fn empty_graph_writes_just_the_header() {
        assert_eq!(
            write_trig(&[]),
            "@prefix oa: <http://www.w3.org/ns/oa#> .\n"
        );
        assert_eq!(
            write_turtle(&TripleGraph::new()).unwrap(),
            "@prefix oa: <http://www.w3.org/ns/oa#> .\n"
        );
    }

    #[test]
    fn named_graph_is_rejected_by_turtle_writer() {
        let g = TripleGraph::named(iri("http://e.com/g"));
        assert_eq!(write_turtle(&g), Err(GraphError::NamedGraphInTurtle));
    }

    #[test]
    fn graph_body_becomes_named_graph() {
        let mut g = TripleGraph::new();
        g.insert(Triple::new(
            iri("http://e.com/s"),
            iri("http://e.com/p"),
            Literal::simple("one"),
        ));
        g.insert(Triple::new(
            iri("http://e.com/s"),
            iri("http://e.com/p"),
            Literal::simple("two"),
        ));
        let a = new_annotation(
            vec![external("http://e.com/t")],
            vec![ResourceRef::Graph { graph: g }],
            None,
            Provenance::default(),
        )
        .unwrap();
        let graphs = to_graph(&a, &cfg()).unwrap();
        assert_eq!(graphs.len(), 2);
        assert_eq!(graphs[0].name, None);
        let name = graphs[1].name.clone().unwrap();
        assert_eq!(name.as_str(), "urn:oa-graph:0");
        assert_eq!(graphs[1].len(), 2);
        let body_ref = graphs[0]
            .triples
            .iter()
            .any(|t| t.predicate == cfg().term("hasBody") && t.object == Object::Iri(name.clone()));
        assert!(body_ref, "body must reference the graph name");
        let typed = graphs[0].triples.iter().any(|t| {
            t.subject == Subject::Iri(name.clone())
                && t.predicate.as_str() == RDF_TYPE
                && t.object == Object::Iri(cfg().graph_type_iri.clone())
        });
        assert!(typed, "graph name must be typed with the configured iri");
    }

    #[test]
    fn external_only_annotation_stays_in_default_graph() {
        let a = new_annotation(
            vec![external("http://e.com/t")],
            vec![external("http://e.com/b")],
            None,
            Provenance::default(),
        )
        .unwrap();
        let graphs = to_graph(&a, &cfg()).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].name, None);
    }

    #[test]
    fn invalid_annotation_is_rejected() {
        let mut a = new_annotation(
            vec![external("http://e.com/t")],
            vec![],
            None,
            Provenance::default(),
        )
        .unwrap();
        a.bodies.push(ResourceRef::Graph {
            graph: TripleGraph::new(),
        });
        assert!(matches!(
            to_graph(&a, &cfg()),
            Err(GraphError::InvalidAnnotation(_))
        ));
    }

    #[test]
    fn tag_annotation_round_trips_through_trig() {
        let a = new_annotation(
            vec![external("http://maphub.example/maps/gibraltar.jpg")],
            vec![
                ResourceRef::tag(iri("http://dbpedia.org/resource/Gibraltar")),
                ResourceRef::tag(iri("http://dbpedia.org/resource/Hercules")),
            ],
            Some(Motivation::Tagging),
            Provenance {
                annotated_by: Some(Agent::named("behas")),
                ..Provenance::default()
            },
        )
        .unwrap();
        let graphs = to_graph(&a, &cfg()).unwrap();
        let text = write_trig(&graphs);
        let back = parse_trig(&text).unwrap();
        assert!(
            graphs_isomorphic(&graphs, &back),
            "parse-back differs:\n{text}"
        );
    }

    #[test]
    fn gnarly_literals_survive_the_round_trip() {
        let mut g = TripleGraph::new();
        g.insert(Triple::new(
            Subject::Blank("x".into()),
            iri("http://e.com/p"),
            Literal::simple("line\nbreak \"quoted\" tab\t backslash\\ unicode \u{1F300}"),
        ));
        g.insert(Triple::new(
            Subject::Blank("x".into()),
            iri("http://e.com/p"),
            Literal::lang("ol\u{e1}", "pt-BR"),
        ));
        g.insert(Triple::new(
            iri("http://e.com/weird%20path?q=1"),
            iri("http://e.com/p"),
            Literal::typed("0007", iri("http://www.w3.org/2001/XMLSchema#integer")),
        ));
        let text = write_trig(std::slice::from_ref(&g));
        let back = parse_trig(&text).unwrap();
        assert!(graphs_isomorphic(std::slice::from_ref(&g), &back), "{text}");
    }

    #[test]
    fn writer_output_is_stable() {
        let a = new_annotation(
            vec![external("http://e.com/t")],
            vec![ResourceRef::embedded(
                EmbeddedContent::text("nice!").with_media_type("text/plain"),
            )],
            Some(Motivation::Commenting),
            Provenance::default(),
        )
        .unwrap();
        let one = write_trig(&to_graph(&a, &cfg()).unwrap());
        let two = write_trig(&to_graph(&a, &cfg()).unwrap());
        assert_eq!(one, two);
        assert!(one.contains(" a oa:Annotation ."));
    }

    #[test]
    fn turtle_parser_rejects_named_graphs() {
        let text = "@prefix oa: <http://www.w3.org/ns/oa#> .\n<http://e.com/g> {\n}\n";
        let err = parse_turtle(text).unwrap_err();
        assert!(err.message.contains("named graphs"));
        assert!(parse_trig(text).is_ok());
    }

    #[test]
    fn blank_labels_from_graph_bodies_are_not_reused() {
        let mut g = TripleGraph::new();
        g.insert(Triple::new(
            Subject::Blank("b0".into()),
            iri("http://e.com/p"),
            Literal::simple("in the body graph"),
        ));
        let a = new_annotation(
            vec![external("http://e.com/t")],
            vec![
                ResourceRef::Graph { graph: g },
                ResourceRef::embedded(EmbeddedContent::text("comment")),
            ],
            None,
            Provenance::default(),
        )
        .unwrap();
        let graphs = to_graph(&a, &cfg()).unwrap();
        let default_blanks: BTreeSet<String> = graphs[0]
            .triples
            .iter()
            .flat_map(|t| {
                let mut v = Vec::new();
                if let Subject::Blank(l) = &t.subject {
                    v.push(l.clone());
                }
                if let Object::Blank(l) = &t.object {
                    v.push(l.clone());
                }
                v
            })
            .collect();
        assert!(
            !default_blanks.contains("b0"),
            "allocator reused a body-graph label"
        );
    }
}
