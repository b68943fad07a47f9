//! The JSON-LD document form.
//!
//! Documents use the short keys of [`vocab::TERM_IRIS`](super::vocab) under
//! an `@context` reference; node kinds are told apart by `@type`. Inside an
//! embedded `@graph`, predicates and datatypes are raw IRIs. Key order is
//! fixed and repeated serialization of equal annotations is byte-identical.
//!
//! Unknown top-level keys are not rejected: they land in
//! `Annotation::extensions` and are re-emitted after the model-owned keys.

use chrono::{DateTime, SecondsFormat, Utc};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::iri::Iri;
use crate::model::{
    validate, Agent, Annotation, DcmiType, EmbeddedContent, Motivation, Provenance, ResourceRef,
    Selector, SpecificResource, State, Style, SvgShape, Violation,
};
use crate::serialization::graph::{Literal, Object, Subject, Triple, TripleGraph};
use crate::serialization::vocab::VocabularyConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("annotation is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAnnotation(Vec<Violation>),
    #[error("document has no target")]
    MissingTarget,
    #[error("unknown type {type_name:?} at {path}")]
    UnknownType { path: String, type_name: String },
    #[error("malformed node at {path}: {reason}")]
    MalformedNode { path: String, reason: String },
}

fn malformed(path: impl Into<String>, reason: impl Into<String>) -> DocumentError {
    DocumentError::MalformedNode {
        path: path.into(),
        reason: reason.into(),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "@context",
    "@id",
    "@type",
    "motivatedBy",
    "hasBody",
    "hasTarget",
    "annotatedBy",
    "annotatedAt",
    "serializedBy",
    "serializedAt",
    "styledBy",
];

const NODE_DISCRIMINATORS: &[&str] = &["SpecificResource", "ContentAsText", "SemanticTag", "Graph"];

fn timestamp_value(ts: DateTime<Utc>) -> Value {
    Value::String(ts.to_rfc3339_opts(SecondsFormat::AutoSi, true))
}

fn dctypes_entry(dcmi: &DcmiType) -> String {
    format!("dctypes:{}", dcmi.label())
}

fn type_entry(discriminator: &str, dcmi: &Option<DcmiType>) -> Value {
    match dcmi {
        None => Value::String(discriminator.to_string()),
        Some(d) => Value::Array(vec![
            Value::String(discriminator.to_string()),
            Value::String(dctypes_entry(d)),
        ]),
    }
}

fn agent_node(agent: &Agent) -> Value {
    let mut node = Map::new();
    if let Some(id) = &agent.id {
        node.insert("@id".into(), Value::String(id.to_string()));
    }
    if let Some(name) = &agent.name {
        node.insert("name".into(), Value::String(name.clone()));
    }
    Value::Object(node)
}

fn content_fields(node: &mut Map<String, Value>, content: &EmbeddedContent) {
    node.insert("chars".into(), Value::String(content.text.clone()));
    if let Some(mt) = &content.media_type {
        node.insert("format".into(), Value::String(mt.clone()));
    }
    if let Some(lang) = &content.language {
        node.insert("language".into(), Value::String(lang.clone()));
    }
}

fn style_node(style: &Style) -> Value {
    let mut node = Map::new();
    node.insert("@type".into(), Value::String("Style".into()));
    content_fields(&mut node, &style.styled_by);
    if let Some(class) = &style.style_class {
        node.insert("styleClass".into(), Value::String(class.clone()));
    }
    Value::Object(node)
}

fn number(v: f64) -> Value {
    Value::Number(serde_json::Number::from_f64(v).expect("finite coordinate"))
}

fn selector_node(selector: &Selector) -> Value {
    let mut node = Map::new();
    match selector {
        Selector::TextPosition { start, end } => {
            node.insert("@type".into(), Value::String("TextPositionSelector".into()));
            node.insert("start".into(), Value::from(*start as u64));
            node.insert("end".into(), Value::from(*end as u64));
        }
        Selector::TextQuote {
            exact,
            prefix,
            suffix,
        } => {
            node.insert("@type".into(), Value::String("TextQuoteSelector".into()));
            node.insert("exact".into(), Value::String(exact.clone()));
            if let Some(p) = prefix {
                node.insert("prefix".into(), Value::String(p.clone()));
            }
            if let Some(s) = suffix {
                node.insert("suffix".into(), Value::String(s.clone()));
            }
        }
        Selector::Fragment { value, conforms_to } => {
            node.insert("@type".into(), Value::String("FragmentSelector".into()));
            node.insert("value".into(), Value::String(value.clone()));
            if let Some(c) = conforms_to {
                node.insert("conformsTo".into(), Value::String(c.to_string()));
            }
        }
        Selector::SvgArea { shape } => {
            node.insert("@type".into(), Value::String("SvgSelector".into()));
            match shape {
                SvgShape::Circle { cx, cy, r } => {
                    node.insert("shape".into(), Value::String("circle".into()));
                    node.insert("cx".into(), number(*cx));
                    node.insert("cy".into(), number(*cy));
                    node.insert("r".into(), number(*r));
                }
                SvgShape::Rect { x, y, w, h } => {
                    node.insert("shape".into(), Value::String("rect".into()));
                    node.insert("x".into(), number(*x));
                    node.insert("y".into(), number(*y));
                    node.insert("w".into(), number(*w));
                    node.insert("h".into(), number(*h));
                }
                SvgShape::Polygon { vertices } => {
                    node.insert("shape".into(), Value::String("polygon".into()));
                    let points: Vec<Value> = vertices
                        .iter()
                        .map(|(x, y)| Value::Array(vec![number(*x), number(*y)]))
                        .collect();
                    node.insert("points".into(), Value::Array(points));
                }
            }
        }
    }
    Value::Object(node)
}

fn state_node(state: &State) -> Value {
    let mut node = Map::new();
    match state {
        State::HttpRequest { headers } => {
            node.insert("@type".into(), Value::String("HttpRequestState".into()));
            let pairs: Vec<Value> = headers
                .iter()
                .map(|(name, value)| {
                    Value::Array(vec![
                        Value::String(name.clone()),
                        Value::String(value.clone()),
                    ])
                })
                .collect();
            node.insert("headers".into(), Value::Array(pairs));
        }
        State::Time { source_date } => {
            node.insert("@type".into(), Value::String("TimeState".into()));
            node.insert("sourceDate".into(), timestamp_value(*source_date));
        }
    }
    Value::Object(node)
}

fn subject_str(subject: &Subject) -> String {
    match subject {
        Subject::Iri(i) => i.to_string(),
        Subject::Blank(label) => format!("_:{label}"),
    }
}

fn object_value(object: &Object) -> Value {
    match object {
        Object::Iri(i) => {
            let mut node = Map::new();
            node.insert("@id".into(), Value::String(i.to_string()));
            Value::Object(node)
        }
        Object::Blank(label) => {
            let mut node = Map::new();
            node.insert("@id".into(), Value::String(format!("_:{label}")));
            Value::Object(node)
        }
        Object::Literal(l) => {
            if l.datatype().is_none() && l.language().is_none() {
                return Value::String(l.lexical().to_string());
            }
            let mut node = Map::new();
            node.insert("@value".into(), Value::String(l.lexical().to_string()));
            if let Some(dt) = l.datatype() {
                node.insert("@type".into(), Value::String(dt.to_string()));
            }
            if let Some(lang) = l.language() {
                node.insert("@language".into(), Value::String(lang.to_string()));
            }
            Value::Object(node)
        }
    }
}

fn graph_nodes(graph: &TripleGraph) -> Value {
    use std::collections::BTreeMap;
    let mut by_subject: BTreeMap<&Subject, BTreeMap<&Iri, Vec<&Object>>> = BTreeMap::new();
    for t in &graph.triples {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry(&t.predicate)
            .or_default()
            .push(&t.object);
    }
    let mut nodes = Vec::new();
    for (subject, predicates) in by_subject {
        let mut node = Map::new();
        node.insert("@id".into(), Value::String(subject_str(subject)));
        for (predicate, objects) in predicates {
            let mut values: Vec<Value> = objects.into_iter().map(object_value).collect();
            let value = if values.len() == 1 {
                values.pop().expect("one element")
            } else {
                Value::Array(values)
            };
            node.insert(predicate.to_string(), value);
        }
        nodes.push(Value::Object(node));
    }
    Value::Array(nodes)
}

fn resource_node(resource: &ResourceRef) -> Value {
    let mut node = Map::new();
    match resource {
        ResourceRef::External { iri, dcmi } => {
            node.insert("@id".into(), Value::String(iri.to_string()));
            if let Some(d) = dcmi {
                node.insert("@type".into(), Value::String(dctypes_entry(d)));
            }
        }
        ResourceRef::Embedded { content, dcmi } => {
            node.insert("@type".into(), type_entry("ContentAsText", dcmi));
            content_fields(&mut node, content);
        }
        ResourceRef::SemanticTag { concept } => {
            node.insert("@id".into(), Value::String(concept.to_string()));
            node.insert("@type".into(), Value::String("SemanticTag".into()));
        }
        ResourceRef::Graph { graph } => {
            if let Some(name) = &graph.name {
                node.insert("@id".into(), Value::String(name.to_string()));
            }
            node.insert("@type".into(), Value::String("Graph".into()));
            node.insert("@graph".into(), graph_nodes(graph));
        }
        ResourceRef::Specific { spec, dcmi } => {
            node.insert("@type".into(), type_entry("SpecificResource", dcmi));
            node.insert("hasSource".into(), Value::String(spec.source.to_string()));
            if let Some(selector) = &spec.selector {
                node.insert("hasSelector".into(), selector_node(selector));
            }
            if let Some(state) = &spec.state {
                node.insert("hasState".into(), state_node(state));
            }
            if let Some(class) = &spec.style_class {
                node.insert("styleClass".into(), Value::String(class.clone()));
            }
        }
    }
    Value::Object(node)
}

/// Serializes a valid annotation to its document form. Key order is fixed,
/// so equal annotations produce byte-identical JSON.
pub fn to_document(a: &Annotation, cfg: &VocabularyConfig) -> Result<Value, DocumentError> {
    let report = validate(a);
    if !report.is_empty() {
        return Err(DocumentError::InvalidAnnotation(report.into_violations()));
    }
    let mut doc = Map::new();
    doc.insert(
        "@context".into(),
        Value::String(cfg.context_iri.to_string()),
    );
    if let Some(id) = &a.id {
        doc.insert("@id".into(), Value::String(id.to_string()));
    }
    doc.insert("@type".into(), Value::String("Annotation".into()));
    if let Some(motivation) = &a.motivation {
        let value = match motivation {
            Motivation::Extension(iri) => iri.to_string(),
            named => named
                .name()
                .expect("closed motivation has a name")
                .to_string(),
        };
        doc.insert("motivatedBy".into(), Value::String(value));
    }
    if !a.bodies.is_empty() {
        doc.insert(
            "hasBody".into(),
            Value::Array(a.bodies.iter().map(resource_node).collect()),
        );
    }
    doc.insert(
        "hasTarget".into(),
        Value::Array(a.targets.iter().map(resource_node).collect()),
    );
    if let Some(agent) = &a.provenance.annotated_by {
        doc.insert("annotatedBy".into(), agent_node(agent));
    }
    if let Some(ts) = a.provenance.annotated_at {
        doc.insert("annotatedAt".into(), timestamp_value(ts));
    }
    if let Some(agent) = &a.provenance.serialized_by {
        doc.insert("serializedBy".into(), agent_node(agent));
    }
    if let Some(ts) = a.provenance.serialized_at {
        doc.insert("serializedAt".into(), timestamp_value(ts));
    }
    if let Some(style) = &a.style {
        doc.insert("styledBy".into(), style_node(style));
    }
    for (key, value) in &a.extensions {
        if !doc.contains_key(key) {
            doc.insert(key.clone(), value.clone());
        }
    }
    Ok(Value::Object(doc))
}

fn type_strings(value: Option<&Value>, path: &str) -> Result<Vec<String>, DocumentError> {
    match value {
        None => Ok(vec![]),
        Some(Value::String(s)) => Ok(vec![s.clone()]),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| malformed(path, "@type entries must be strings"))
            })
            .collect(),
        Some(_) => Err(malformed(
            path,
            "@type must be a string or array of strings",
        )),
    }
}

fn single_or_array(value: &Value) -> Vec<&Value> {
    match value {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    }
}

fn require_str<'a>(
    node: &'a Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'a str, DocumentError> {
    node.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| malformed(path, format!("{key} must be a string")))
}

fn opt_str<'a>(
    node: &'a Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<Option<&'a str>, DocumentError> {
    match node.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(Some)
            .ok_or_else(|| malformed(path, format!("{key} must be a string"))),
    }
}

fn parse_iri(s: &str, path: &str) -> Result<Iri, DocumentError> {
    Iri::new(s).map_err(|e| malformed(path, format!("{s:?}: {e}")))
}

fn parse_timestamp(value: &Value, path: &str) -> Result<DateTime<Utc>, DocumentError> {
    let s = value
        .as_str()
        .ok_or_else(|| malformed(path, "timestamp must be a string"))?;
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc))
        .map_err(|e| malformed(path, format!("{s:?}: {e}")))
}

fn parse_f64(node: &Map<String, Value>, key: &str, path: &str) -> Result<f64, DocumentError> {
    node.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| malformed(path, format!("{key} must be a number")))
}

fn parse_usize(node: &Map<String, Value>, key: &str, path: &str) -> Result<usize, DocumentError> {
    node.get(key)
        .and_then(Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| malformed(path, format!("{key} must be a non-negative integer")))
}

fn parse_agent(value: &Value, path: &str) -> Result<Agent, DocumentError> {
    let node = value
        .as_object()
        .ok_or_else(|| malformed(path, "agent must be an object"))?;
    let id = match opt_str(node, "@id", path)? {
        Some(s) => Some(parse_iri(s, path)?),
        None => None,
    };
    let name = opt_str(node, "name", path)?.map(str::to_string);
    Ok(Agent { id, name })
}

fn parse_content(node: &Map<String, Value>, path: &str) -> Result<EmbeddedContent, DocumentError> {
    Ok(EmbeddedContent {
        text: require_str(node, "chars", path)?.to_string(),
        media_type: opt_str(node, "format", path)?.map(str::to_string),
        language: opt_str(node, "language", path)?.map(str::to_string),
    })
}

fn parse_selector(value: &Value, path: &str) -> Result<Selector, DocumentError> {
    let node = value
        .as_object()
        .ok_or_else(|| malformed(path, "selector must be an object"))?;
    let types = type_strings(node.get("@type"), path)?;
    let kind = types
        .first()
        .ok_or_else(|| malformed(path, "selector needs an @type"))?;
    match kind.as_str() {
        "TextPositionSelector" => Ok(Selector::TextPosition {
            start: parse_usize(node, "start", path)?,
            end: parse_usize(node, "end", path)?,
        }),
        "TextQuoteSelector" => Ok(Selector::TextQuote {
            exact: require_str(node, "exact", path)?.to_string(),
            prefix: opt_str(node, "prefix", path)?.map(str::to_string),
            suffix: opt_str(node, "suffix", path)?.map(str::to_string),
        }),
        "FragmentSelector" => {
            let conforms_to = match opt_str(node, "conformsTo", path)? {
                Some(s) => Some(parse_iri(s, path)?),
                None => None,
            };
            Ok(Selector::Fragment {
                value: require_str(node, "value", path)?.to_string(),
                conforms_to,
            })
        }
        "SvgSelector" => {
            let shape = match require_str(node, "shape", path)? {
                "circle" => SvgShape::Circle {
                    cx: parse_f64(node, "cx", path)?,
                    cy: parse_f64(node, "cy", path)?,
                    r: parse_f64(node, "r", path)?,
                },
                "rect" => SvgShape::Rect {
                    x: parse_f64(node, "x", path)?,
                    y: parse_f64(node, "y", path)?,
                    w: parse_f64(node, "w", path)?,
                    h: parse_f64(node, "h", path)?,
                },
                "polygon" => {
                    let points = node
                        .get("points")
                        .and_then(Value::as_array)
                        .ok_or_else(|| malformed(path, "points must be an array"))?;
                    let mut vertices = Vec::with_capacity(points.len());
                    for p in points {
                        let pair = p.as_array().filter(|a| a.len() == 2);
                        let (x, y) = pair
                            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
                            .ok_or_else(|| malformed(path, "each point must be [x, y]"))?;
                        vertices.push((x, y));
                    }
                    SvgShape::Polygon { vertices }
                }
                other => return Err(malformed(path, format!("unknown shape {other:?}"))),
            };
            Ok(Selector::SvgArea { shape })
        }
        other => Err(DocumentError::UnknownType {
            path: path.to_string(),
            type_name: other.to_string(),
        }),
    }
}

fn parse_state(value: &Value, path: &str) -> Result<State, DocumentError> {
    let node = value
        .as_object()
        .ok_or_else(|| malformed(path, "state must be an object"))?;
    let types = type_strings(node.get("@type"), path)?;
    let kind = types
        .first()
        .ok_or_else(|| malformed(path, "state needs an @type"))?;
    match kind.as_str() {
        "HttpRequestState" => {
            let headers = node
                .get("headers")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed(path, "headers must be an array"))?;
            let mut pairs = Vec::with_capacity(headers.len());
            for h in headers {
                let pair = h.as_array().filter(|a| a.len() == 2);
                let (name, value) = pair
                    .and_then(|a| Some((a[0].as_str()?, a[1].as_str()?)))
                    .ok_or_else(|| malformed(path, "each header must be [name, value]"))?;
                pairs.push((name.to_string(), value.to_string()));
            }
            Ok(State::HttpRequest { headers: pairs })
        }
        "TimeState" => {
            let source_date = node
                .get("sourceDate")
                .ok_or_else(|| malformed(path, "sourceDate is required"))?;
            Ok(State::Time {
                source_date: parse_timestamp(source_date, path)?,
            })
        }
        other => Err(DocumentError::UnknownType {
            path: path.to_string(),
            type_name: other.to_string(),
        }),
    }
}

fn parse_graph_object(value: &Value, path: &str) -> Result<Object, DocumentError> {
    match value {
        Value::String(s) => Ok(Object::Literal(Literal::simple(s.clone()))),
        Value::Object(node) => {
            if let Some(id) = node.get("@id") {
                let s = id
                    .as_str()
                    .ok_or_else(|| malformed(path, "@id must be a string"))?;
                return Ok(match s.strip_prefix("_:") {
                    Some(label) => Object::Blank(label.to_string()),
                    None => Object::Iri(parse_iri(s, path)?),
                });
            }
            let lexical = require_str(node, "@value", path)?.to_string();
            let datatype = opt_str(node, "@type", path)?;
            let language = opt_str(node, "@language", path)?;
            match (datatype, language) {
                (Some(dt), None) => Ok(Object::Literal(Literal::typed(
                    lexical,
                    parse_iri(dt, path)?,
                ))),
                (None, Some(lang)) => Ok(Object::Literal(Literal::lang(lexical, lang))),
                (None, None) => Ok(Object::Literal(Literal::simple(lexical))),
                (Some(_), Some(_)) => Err(malformed(
                    path,
                    "literal cannot have both @type and @language",
                )),
            }
        }
        _ => Err(malformed(path, "object must be a string or node object")),
    }
}

fn parse_graph(node: &Map<String, Value>, path: &str) -> Result<TripleGraph, DocumentError> {
    let name = match opt_str(node, "@id", path)? {
        Some(s) => Some(parse_iri(s, path)?),
        None => None,
    };
    let nodes = node
        .get("@graph")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed(path, "@graph must be an array"))?;
    let mut graph = TripleGraph {
        name,
        triples: Default::default(),
    };
    for (i, n) in nodes.iter().enumerate() {
        let npath = format!("{path}.@graph[{i}]");
        let obj = n
            .as_object()
            .ok_or_else(|| malformed(&npath, "graph node must be an object"))?;
        let id = require_str(obj, "@id", &npath)?;
        let subject = match id.strip_prefix("_:") {
            Some(label) => Subject::Blank(label.to_string()),
            None => Subject::Iri(parse_iri(id, &npath)?),
        };
        for (key, value) in obj {
            if key == "@id" {
                continue;
            }
            if key.starts_with('@') {
                return Err(malformed(&npath, format!("unexpected keyword {key}")));
            }
            let predicate = parse_iri(key, &npath)?;
            for item in single_or_array(value) {
                let object = parse_graph_object(item, &npath)?;
                graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
            }
        }
    }
    Ok(graph)
}

/// Splits node types into an optional DCMI type and leftover labels that
/// are neither discriminators nor `dctypes:` entries.
fn split_dcmi(
    types: &[String],
    path: &str,
) -> Result<(Option<DcmiType>, Vec<String>), DocumentError> {
    let mut dcmi = None;
    let mut leftover = Vec::new();
    for t in types {
        if NODE_DISCRIMINATORS.contains(&t.as_str()) {
            continue;
        }
        if let Some(label) = t.strip_prefix("dctypes:") {
            if dcmi.is_some() {
                return Err(malformed(path, "more than one dctypes entry"));
            }
            dcmi = Some(DcmiType::from_label(label));
        } else {
            leftover.push(t.clone());
        }
    }
    Ok((dcmi, leftover))
}

fn parse_resource(value: &Value, path: &str) -> Result<ResourceRef, DocumentError> {
    if let Value::String(s) = value {
        return Ok(ResourceRef::External {
            iri: parse_iri(s, path)?,
            dcmi: None,
        });
    }
    let node = value
        .as_object()
        .ok_or_else(|| malformed(path, "resource must be a node object or IRI string"))?;
    let types = type_strings(node.get("@type"), path)?;
    let (dcmi, leftover) = split_dcmi(&types, path)?;

    if types.iter().any(|t| t == "SpecificResource") {
        let source = parse_iri(require_str(node, "hasSource", path)?, path)?;
        let selector = match node.get("hasSelector") {
            Some(v) => Some(parse_selector(v, &format!("{path}.hasSelector"))?),
            None => None,
        };
        let state = match node.get("hasState") {
            Some(v) => Some(parse_state(v, &format!("{path}.hasState"))?),
            None => None,
        };
        let style_class = opt_str(node, "styleClass", path)?.map(str::to_string);
        return Ok(ResourceRef::Specific {
            spec: SpecificResource {
                source,
                selector,
                state,
                style_class,
            },
            dcmi,
        });
    }
    if types.iter().any(|t| t == "ContentAsText") {
        return Ok(ResourceRef::Embedded {
            content: parse_content(node, path)?,
            dcmi,
        });
    }
    if types.iter().any(|t| t == "SemanticTag") {
        let concept = parse_iri(require_str(node, "@id", path)?, path)?;
        return Ok(ResourceRef::SemanticTag { concept });
    }
    if types.iter().any(|t| t == "Graph") {
        return Ok(ResourceRef::Graph {
            graph: parse_graph(node, path)?,
        });
    }
    if let Some(unknown) = leftover.first() {
        return Err(DocumentError::UnknownType {
            path: path.to_string(),
            type_name: unknown.clone(),
        });
    }
    let iri = parse_iri(require_str(node, "@id", path)?, path)?;
    Ok(ResourceRef::External { iri, dcmi })
}

fn parse_motivation(value: &Value, path: &str) -> Result<Motivation, DocumentError> {
    let s = value
        .as_str()
        .ok_or_else(|| malformed(path, "motivation must be a string"))?;
    if let Some(m) = Motivation::from_name(s) {
        return Ok(m);
    }
    if s.contains(':') {
        return Ok(Motivation::Extension(parse_iri(s, path)?));
    }
    Err(malformed(path, format!("unknown motivation {s:?}")))
}

fn parse_style(value: &Value, path: &str) -> Result<Style, DocumentError> {
    let node = value
        .as_object()
        .ok_or_else(|| malformed(path, "style must be an object"))?;
    Ok(Style {
        styled_by: parse_content(node, path)?,
        style_class: opt_str(node, "styleClass", path)?.map(str::to_string),
    })
}

/// Parses a document back into an annotation. Inverse of [`to_document`]
/// on everything that function emits; no validation beyond structure, so a
/// parsed annotation should still go through `validate` before use.
pub fn from_document(doc: &Value, cfg: &VocabularyConfig) -> Result<Annotation, DocumentError> {
    let _ = cfg;
    let root = doc
        .as_object()
        .ok_or_else(|| malformed("", "document must be an object"))?;
    let types = type_strings(root.get("@type"), "@type")?;
    if types.is_empty() {
        return Err(malformed("@type", "document needs an @type"));
    }
    if !types.iter().any(|t| t == "Annotation") {
        return Err(DocumentError::UnknownType {
            path: "@type".into(),
            type_name: types[0].clone(),
        });
    }

    let id = match opt_str(root, "@id", "@id")? {
        Some(s) => Some(parse_iri(s, "@id")?),
        None => None,
    };
    let motivation = match root.get("motivatedBy") {
        Some(v) => Some(parse_motivation(v, "motivatedBy")?),
        None => None,
    };
    let bodies = match root.get("hasBody") {
        Some(v) => single_or_array(v)
            .iter()
            .enumerate()
            .map(|(i, item)| parse_resource(item, &format!("hasBody[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![],
    };
    let targets = match root.get("hasTarget") {
        Some(v) => single_or_array(v)
            .iter()
            .enumerate()
            .map(|(i, item)| parse_resource(item, &format!("hasTarget[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![],
    };
    if targets.is_empty() {
        return Err(DocumentError::MissingTarget);
    }

    let provenance = Provenance {
        annotated_by: match root.get("annotatedBy") {
            Some(v) => Some(parse_agent(v, "annotatedBy")?),
            None => None,
        },
        annotated_at: match root.get("annotatedAt") {
            Some(v) => Some(parse_timestamp(v, "annotatedAt")?),
            None => None,
        },
        serialized_by: match root.get("serializedBy") {
            Some(v) => Some(parse_agent(v, "serializedBy")?),
            None => None,
        },
        serialized_at: match root.get("serializedAt") {
            Some(v) => Some(parse_timestamp(v, "serializedAt")?),
            None => None,
        },
    };
    let style = match root.get("styledBy") {
        Some(v) => Some(parse_style(v, "styledBy")?),
        None => None,
    };
    let mut extensions = Map::new();
    for (key, value) in root {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            extensions.insert(key.clone(), value.clone());
        }
    }
    Ok(Annotation {
        id,
        bodies,
        targets,
        motivation,
        provenance,
        style,
        extensions,
    })
}
