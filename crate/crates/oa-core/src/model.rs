//! The annotation domain model.
//!
//! An [`Annotation`] ties zero or more bodies to one or more targets, with
//! optional motivation, provenance, and style. Construction via
//! [`new_annotation`] and [`specific_target`] establishes the invariants;
//! [`validate`] re-checks them on arbitrary values (for example after
//! deserializing a foreign document) and reports violations as data.

use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::iri::Iri;
use crate::serialization::graph::TripleGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DcmiType {
    Image,
    Sound,
    Text,
    MovingImage,
    Dataset,
    InteractiveResource,
    Other(String),
}

impl DcmiType {
    pub fn label(&self) -> &str {
        match self {
            DcmiType::Image => "Image",
            DcmiType::Sound => "Sound",
            DcmiType::Text => "Text",
            DcmiType::MovingImage => "MovingImage",
            DcmiType::Dataset => "Dataset",
            DcmiType::InteractiveResource => "InteractiveResource",
            DcmiType::Other(label) => label,
        }
    }

    pub fn from_label(label: &str) -> DcmiType {
        match label {
            "Image" => DcmiType::Image,
            "Sound" => DcmiType::Sound,
            "Text" => DcmiType::Text,
            "MovingImage" => DcmiType::MovingImage,
            "Dataset" => DcmiType::Dataset,
            "InteractiveResource" => DcmiType::InteractiveResource,
            other => DcmiType::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Motivation {
    Commenting,
    Tagging,
    Bookmarking,
    Questioning,
    Replying,
    Describing,
    Extension(Iri),
}

impl Motivation {
    /// Wire name of a closed variant; `None` for `Extension`.
    pub fn name(&self) -> Option<&'static str> {
        match self {
            Motivation::Commenting => Some("commenting"),
            Motivation::Tagging => Some("tagging"),
            Motivation::Bookmarking => Some("bookmarking"),
            Motivation::Questioning => Some("questioning"),
            Motivation::Replying => Some("replying"),
            Motivation::Describing => Some("describing"),
            Motivation::Extension(_) => None,
        }
    }

    pub fn from_name(name: &str) -> Option<Motivation> {
        match name {
            "commenting" => Some(Motivation::Commenting),
            "tagging" => Some(Motivation::Tagging),
            "bookmarking" => Some(Motivation::Bookmarking),
            "questioning" => Some(Motivation::Questioning),
            "replying" => Some(Motivation::Replying),
            "describing" => Some(Motivation::Describing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Agent {
    pub id: Option<Iri>,
    pub name: Option<String>,
}

impl Agent {
    pub fn named(name: impl Into<String>) -> Agent {
        Agent {
            id: None,
            name: Some(name.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub annotated_by: Option<Agent>,
    pub annotated_at: Option<DateTime<Utc>>,
    pub serialized_by: Option<Agent>,
    pub serialized_at: Option<DateTime<Utc>>,
}

/// Character content carried inside an annotation instead of by reference.
///
/// `media_type: None` means "defaulted", which reads as text/plain; the
/// distinction matters because empty text is only allowed when the media
/// type was set on purpose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedContent {
    pub text: String,
    pub media_type: Option<String>,
    pub language: Option<String>,
}

impl EmbeddedContent {
    pub fn text(text: impl Into<String>) -> EmbeddedContent {
        EmbeddedContent {
            text: text.into(),
            media_type: None,
            language: None,
        }
    }

    pub fn with_media_type(mut self, media_type: impl Into<String>) -> EmbeddedContent {
        self.media_type = Some(media_type.into());
        self
    }

    pub fn with_language(mut self, language: impl Into<String>) -> EmbeddedContent {
        self.language = Some(language.into());
        self
    }

    pub fn effective_media_type(&self) -> &str {
        self.media_type.as_deref().unwrap_or("text/plain")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SvgShape {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Polygon { vertices: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    TextPosition {
        start: usize,
        end: usize,
    },
    TextQuote {
        exact: String,
        prefix: Option<String>,
        suffix: Option<String>,
    },
    Fragment {
        value: String,
        conforms_to: Option<Iri>,
    },
    SvgArea {
        shape: SvgShape,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    HttpRequest { headers: Vec<(String, String)> },
    Time { source_date: DateTime<Utc> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Style {
    pub styled_by: EmbeddedContent,
    pub style_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecificResource {
    pub source: Iri,
    pub selector: Option<Selector>,
    pub state: Option<State>,
    pub style_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResourceRef {
    External {
        iri: Iri,
        dcmi: Option<DcmiType>,
    },
    Embedded {
        content: EmbeddedContent,
        dcmi: Option<DcmiType>,
    },
    SemanticTag {
        concept: Iri,
    },
    Graph {
        graph: TripleGraph,
    },
    Specific {
        spec: SpecificResource,
        dcmi: Option<DcmiType>,
    },
}

impl ResourceRef {
    pub fn external(iri: Iri) -> ResourceRef {
        ResourceRef::External { iri, dcmi: None }
    }

    pub fn embedded(content: EmbeddedContent) -> ResourceRef {
        ResourceRef::Embedded {
            content,
            dcmi: None,
        }
    }

    pub fn tag(concept: Iri) -> ResourceRef {
        ResourceRef::SemanticTag { concept }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub id: Option<Iri>,
    pub bodies: Vec<ResourceRef>,
    pub targets: Vec<ResourceRef>,
    pub motivation: Option<Motivation>,
    pub provenance: Provenance,
    pub style: Option<Style>,
    /// Unrecognized top-level document keys, carried through serialization
    /// untouched. Empty for annotations built in-process.
    pub extensions: serde_json::Map<String, serde_json::Value>,
}

impl Annotation {
    pub fn with_id(mut self, id: Iri) -> Annotation {
        self.id = Some(id);
        self
    }

    /// Attaches a style. Style-class linkage to any `Specific` body or
    /// target is up to the caller; re-run [`validate`] afterwards.
    pub fn with_style(mut self, style: Style) -> Annotation {
        self.style = Some(style);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("annotation needs at least one target")]
    EmptyTargets,
    #[error("invalid resource at {path}: {reason}")]
    InvalidResource { path: String, reason: String },
    #[error("invalid provenance: {0}")]
    InvalidProvenance(String),
    #[error("specific resource needs at least one of selector, state, style class")]
    NothingSpecified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Outcome of [`validate`]: empty means valid. Violations are sorted by
/// field path, then message, so equal annotations always report identically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_violations(self) -> Vec<Violation> {
        self.violations
    }
}

fn push(out: &mut Vec<Violation>, path: impl Into<String>, message: impl Into<String>) {
    out.push(Violation {
        path: path.into(),
        message: message.into(),
    });
}

fn is_http_token(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| {
            c.is_ascii_alphanumeric()
                || matches!(
                    c,
                    '!' | '#'
                        | '$'
                        | '%'
                        | '&'
                        | '\''
                        | '*'
                        | '+'
                        | '-'
                        | '.'
                        | '^'
                        | '_'
                        | '`'
                        | '|'
                        | '~'
                )
        })
}

fn selector_violations(path: &str, selector: &Selector, out: &mut Vec<Violation>) {
    match selector {
        Selector::TextPosition { start, end } => {
            if start > end {
                push(out, path, "text position start must not exceed end");
            }
        }
        Selector::TextQuote { exact, .. } => {
            if exact.is_empty() {
                push(out, path, "text quote exact must be nonempty");
            }
        }
        Selector::Fragment { value, .. } => {
            if value.is_empty() {
                push(out, path, "fragment value must be nonempty");
            }
            if value.starts_with('#') {
                push(out, path, "fragment value must not include '#'");
            }
        }
        Selector::SvgArea { shape } => match shape {
            SvgShape::Circle { cx, cy, r } => {
                if ![cx, cy, r].iter().all(|v| v.is_finite()) {
                    push(out, path, "circle coordinates must be finite");
                } else if *r <= 0.0 {
                    push(out, path, "circle radius must be positive");
                }
            }
            SvgShape::Rect { x, y, w, h } => {
                if ![x, y, w, h].iter().all(|v| v.is_finite()) {
                    push(out, path, "rect coordinates must be finite");
                } else if *w <= 0.0 || *h <= 0.0 {
                    push(out, path, "rect width and height must be positive");
                }
            }
            SvgShape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    push(out, path, "polygon needs at least 3 vertices");
                }
                if !vertices.iter().all(|(x, y)| x.is_finite() && y.is_finite()) {
                    push(out, path, "polygon vertices must be finite");
                }
            }
        },
    }
}

fn state_violations(path: &str, state: &State, out: &mut Vec<Violation>) {
    if let State::HttpRequest { headers } = state {
        if headers.is_empty() {
            push(out, path, "http request state needs at least one header");
        }
        for (name, _) in headers {
            if !is_http_token(name) {
                push(out, path, format!("header name {name:?} is not a token"));
            }
        }
    }
}

fn content_violations(path: &str, content: &EmbeddedContent, out: &mut Vec<Violation>) {
    if content.text.is_empty() && content.media_type.is_none() {
        push(out, path, "empty text requires an explicit media type");
    }
}

fn dcmi_violations(path: &str, dcmi: &Option<DcmiType>, out: &mut Vec<Violation>) {
    if let Some(DcmiType::Other(label)) = dcmi {
        if label.is_empty() {
            push(out, path, "dcmi label must be nonempty");
        }
    }
}

fn resource_violations(path: &str, resource: &ResourceRef, out: &mut Vec<Violation>) {
    match resource {
        ResourceRef::External { dcmi, .. } => dcmi_violations(path, dcmi, out),
        ResourceRef::Embedded { content, dcmi } => {
            content_violations(path, content, out);
            dcmi_violations(path, dcmi, out);
        }
        ResourceRef::SemanticTag { .. } => {}
        ResourceRef::Graph { graph } => {
            if graph.is_empty() {
                push(out, path, "graph body must contain at least one triple");
            }
        }
        ResourceRef::Specific { spec, dcmi } => {
            if spec.selector.is_none() && spec.state.is_none() && spec.style_class.is_none() {
                push(
                    out,
                    path,
                    "specific resource needs at least one of selector, state, style class",
                );
            }
            if let Some(selector) = &spec.selector {
                selector_violations(&format!("{path}.selector"), selector, out);
            }
            if let Some(state) = &spec.state {
                state_violations(&format!("{path}.state"), state, out);
            }
            if let Some(class) = &spec.style_class {
                if class.is_empty() || class.chars().any(char::is_whitespace) {
                    push(
                        out,
                        format!("{path}.style_class"),
                        "style class must be a nonempty token",
                    );
                }
            }
            dcmi_violations(path, dcmi, out);
        }
    }
}

fn agent_violations(path: &str, agent: &Agent, out: &mut Vec<Violation>) {
    if agent.id.is_none() && agent.name.is_none() {
        push(out, path, "agent needs at least one of id, name");
    }
}

fn provenance_violations(provenance: &Provenance, out: &mut Vec<Violation>) {
    if let Some(agent) = &provenance.annotated_by {
        agent_violations("provenance.annotated_by", agent, out);
    }
    if let Some(agent) = &provenance.serialized_by {
        agent_violations("provenance.serialized_by", agent, out);
    }
    if let (Some(a), Some(s)) = (provenance.annotated_at, provenance.serialized_at) {
        if a > s {
            push(
                out,
                "provenance.annotated_at",
                "annotated_at must not be later than serialized_at",
            );
        }
    }
}

/// Style classes referenced by `Specific` bodies or targets, with paths.
fn referenced_style_classes(a: &Annotation) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (list, name) in [(&a.bodies, "bodies"), (&a.targets, "targets")] {
        for (i, r) in list.iter().enumerate() {
            if let ResourceRef::Specific { spec, .. } = r {
                if let Some(class) = &spec.style_class {
                    out.push((format!("{name}[{i}].style_class"), class.clone()));
                }
            }
        }
    }
    out
}

/// Checks every model invariant and reports all violations found.
pub fn validate(a: &Annotation) -> ValidationReport {
    let mut out = Vec::new();
    if a.targets.is_empty() {
        push(&mut out, "targets", "annotation needs at least one target");
    }
    for (i, body) in a.bodies.iter().enumerate() {
        resource_violations(&format!("bodies[{i}]"), body, &mut out);
    }
    for (i, target) in a.targets.iter().enumerate() {
        resource_violations(&format!("targets[{i}]"), target, &mut out);
        if matches!(target, ResourceRef::SemanticTag { .. }) {
            push(
                &mut out,
                format!("targets[{i}]"),
                "semantic tag not allowed as target",
            );
        }
    }
    provenance_violations(&a.provenance, &mut out);
    if let Some(style) = &a.style {
        content_violations("style.styled_by", &style.styled_by, &mut out);
        if let Some(class) = &style.style_class {
            if class.is_empty() || class.chars().any(char::is_whitespace) {
                push(
                    &mut out,
                    "style.style_class",
                    "style class must be a nonempty token",
                );
            }
        }
    }
    let declared = a.style.as_ref().and_then(|s| s.style_class.as_deref());
    for (path, class) in referenced_style_classes(a) {
        if declared != Some(class.as_str()) {
            push(&mut out, path, "style class without matching style");
        }
    }
    out.sort_by(|l, r| l.path.cmp(&r.path).then_with(|| l.message.cmp(&r.message)));
    out.dedup();
    ValidationReport { violations: out }
}

/// Builds an annotation, or reports the first reason it cannot be valid.
/// Anything this returns passes [`validate`] with an empty report.
pub fn new_annotation(
    targets: Vec<ResourceRef>,
    bodies: Vec<ResourceRef>,
    motivation: Option<Motivation>,
    provenance: Provenance,
) -> Result<Annotation, BuildError> {
    if targets.is_empty() {
        return Err(BuildError::EmptyTargets);
    }
    for (list, name) in [(&targets, "targets"), (&bodies, "bodies")] {
        for (i, r) in list.iter().enumerate() {
            let path = format!("{name}[{i}]");
            let mut violations = Vec::new();
            resource_violations(&path, r, &mut violations);
            if name == "targets" && matches!(r, ResourceRef::SemanticTag { .. }) {
                push(&mut violations, &path, "semantic tag not allowed as target");
            }
            if let ResourceRef::Specific { spec, .. } = r {
                if spec.style_class.is_some() {
                    push(&mut violations, &path, "style class without matching style");
                }
            }
            if let Some(v) = violations.first() {
                return Err(BuildError::InvalidResource {
                    path: v.path.clone(),
                    reason: v.message.clone(),
                });
            }
        }
    }
    let mut violations = Vec::new();
    provenance_violations(&provenance, &mut violations);
    if let Some(v) = violations.first() {
        return Err(BuildError::InvalidProvenance(v.message.clone()));
    }
    Ok(Annotation {
        id: None,
        bodies,
        targets,
        motivation,
        provenance,
        style: None,
        extensions: serde_json::Map::new(),
    })
}

/// Wraps a source in a `SpecificResource` target. At least one of the three
/// refinements must be given; a bare source should be used directly.
pub fn specific_target(
    source: Iri,
    selector: Option<Selector>,
    state: Option<State>,
    style_class: Option<String>,
) -> Result<ResourceRef, BuildError> {
    if selector.is_none() && state.is_none() && style_class.is_none() {
        return Err(BuildError::NothingSpecified);
    }
    let spec = SpecificResource {
        source,
        selector,
        state,
        style_class,
    };
    let resource = ResourceRef::Specific { spec, dcmi: None };
    let mut violations = Vec::new();
    resource_violations("specific", &resource, &mut violations);
    if let Some(v) = violations.first() {
        return Err(BuildError::InvalidResource {
            path: v.path.clone(),
            reason: v.message.clone(),
        });
    }
    Ok(resource)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn image_with_video_body_is_valid() {
        let a = new_annotation(
            vec![ResourceRef::External {
                iri: iri("http://hubblesite.org/image/1234"),
                dcmi: Some(DcmiType::Image),
            }],
            vec![ResourceRef::External {
                iri: iri("http://example.org/video/colliding-galaxies"),
                dcmi: Some(DcmiType::MovingImage),
            }],
            None,
            Provenance::default(),
        )
        .unwrap();
        assert!(validate(&a).is_empty());
        assert_eq!(a.id, None);
    }

    #[test]
    fn semantic_tag_bodies_are_valid() {
        let a = new_annotation(
            vec![ResourceRef::external(iri(
                "http://maphub.example/maps/rock-of-gibraltar.jpg",
            ))],
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
        assert!(validate(&a).is_empty());
        assert_eq!(a.bodies.len(), 2);
    }

    #[test]
    fn empty_targets_are_rejected() {
        let err = new_annotation(
            vec![],
            vec![ResourceRef::external(iri("http://e.com/b"))],
            None,
            Provenance::default(),
        )
        .unwrap_err();
        assert_eq!(err, BuildError::EmptyTargets);
    }

    #[test]
    fn bookmark_without_body_is_valid() {
        let a = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/page"))],
            vec![],
            Some(Motivation::Bookmarking),
            Provenance::default(),
        )
        .unwrap();
        assert!(validate(&a).is_empty());
        assert!(a.bodies.is_empty());
    }

    #[test]
    fn validate_flags_reversed_text_position() {
        let mut a = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![],
            None,
            Provenance::default(),
        )
        .unwrap();
        a.targets[0] = ResourceRef::Specific {
            spec: SpecificResource {
                source: iri("http://e.com/t"),
                selector: Some(Selector::TextPosition { start: 5, end: 2 }),
                state: None,
                style_class: None,
            },
            dcmi: None,
        };
        let report = validate(&a);
        assert_eq!(report.violations().len(), 1);
        assert_eq!(report.violations()[0].path, "targets[0].selector");
    }

    #[test]
    fn semantic_tag_target_is_flagged() {
        let mut a = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![],
            None,
            Provenance::default(),
        )
        .unwrap();
        a.targets[0] = ResourceRef::tag(iri("http://dbpedia.org/resource/Gibraltar"));
        let report = validate(&a);
        assert_eq!(
            report.violations()[0].message,
            "semantic tag not allowed as target"
        );

        let err = new_annotation(
            vec![ResourceRef::tag(iri(
                "http://dbpedia.org/resource/Gibraltar",
            ))],
            vec![],
            None,
            Provenance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidResource { .. }));
    }

    #[test]
    fn specific_target_models_negotiated_circle() {
        let r = specific_target(
            iri("http://e.com/photo"),
            Some(Selector::SvgArea {
                shape: SvgShape::Circle {
                    cx: 100.0,
                    cy: 80.0,
                    r: 40.0,
                },
            }),
            Some(State::HttpRequest {
                headers: vec![("Accept".into(), "image/jpeg".into())],
            }),
            None,
        )
        .unwrap();
        let ResourceRef::Specific { spec, .. } = &r else {
            panic!("expected specific resource");
        };
        assert!(spec.selector.is_some());
        assert!(spec.state.is_some());
    }

    #[test]
    fn specific_target_with_nothing_specified_fails() {
        let err = specific_target(iri("http://e.com/page"), None, None, None).unwrap_err();
        assert_eq!(err, BuildError::NothingSpecified);
    }

    #[test]
    fn style_class_must_resolve_to_declared_style() {
        let target = specific_target(
            iri("http://e.com/doc"),
            Some(Selector::TextQuote {
                exact: "squiggle".into(),
                prefix: None,
                suffix: None,
            }),
            None,
            Some("hl".into()),
        )
        .unwrap();
        let base = Annotation {
            id: None,
            bodies: vec![],
            targets: vec![target],
            motivation: None,
            provenance: Provenance::default(),
            style: None,
            extensions: serde_json::Map::new(),
        };

        let styled = base.clone().with_style(Style {
            styled_by: EmbeddedContent::text(".hl { background: yellow }")
                .with_media_type("text/css"),
            style_class: Some("hl".into()),
        });
        assert!(validate(&styled).is_empty());

        let mismatched = base.clone().with_style(Style {
            styled_by: EmbeddedContent::text(".other { }").with_media_type("text/css"),
            style_class: Some("other".into()),
        });
        assert_eq!(
            validate(&mismatched).violations()[0].message,
            "style class without matching style"
        );

        assert_eq!(
            validate(&base).violations()[0].path,
            "targets[0].style_class"
        );
    }

    #[test]
    fn constructor_rejects_unresolvable_style_class() {
        let target =
            specific_target(iri("http://e.com/doc"), None, None, Some("hl".into())).unwrap();
        let err = new_annotation(vec![target], vec![], None, Provenance::default()).unwrap_err();
        assert_eq!(
            err,
            BuildError::InvalidResource {
                path: "targets[0]".into(),
                reason: "style class without matching style".into(),
            }
        );
    }

    #[test]
    fn provenance_ordering_is_enforced() {
        let later = Utc::now();
        let earlier = later - chrono::Duration::seconds(60);
        let err = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![],
            None,
            Provenance {
                annotated_at: Some(later),
                serialized_at: Some(earlier),
                ..Provenance::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidProvenance(_)));

        let err = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![],
            None,
            Provenance {
                annotated_by: Some(Agent::default()),
                ..Provenance::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidProvenance(_)));
    }

    #[test]
    fn empty_embedded_text_needs_explicit_media_type() {
        let err = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![ResourceRef::embedded(EmbeddedContent::text(""))],
            None,
            Provenance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidResource { .. }));

        let ok = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![ResourceRef::embedded(
                EmbeddedContent::text("").with_media_type("text/plain"),
            )],
            None,
            Provenance::default(),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn report_order_is_path_lexicographic() {
        let a = Annotation {
            id: None,
            bodies: vec![ResourceRef::embedded(EmbeddedContent::text(""))],
            targets: vec![
                ResourceRef::tag(iri("http://e.com/concept")),
                ResourceRef::Specific {
                    spec: SpecificResource {
                        source: iri("http://e.com/t"),
                        selector: Some(Selector::TextPosition { start: 9, end: 1 }),
                        state: None,
                        style_class: None,
                    },
                    dcmi: None,
                },
            ],
            motivation: None,
            provenance: Provenance::default(),
            style: None,
            extensions: serde_json::Map::new(),
        };
        let report = validate(&a);
        let paths: Vec<&str> = report
            .violations()
            .iter()
            .map(|v| v.path.as_str())
            .collect();
        let mut sorted = paths.clone();
        sorted.sort();
        assert_eq!(paths, sorted);
        assert_eq!(
            paths,
            vec!["bodies[0]", "targets[0]", "targets[1].selector"]
        );
    }

    #[test]
    fn graph_body_must_be_nonempty() {
        let err = new_annotation(
            vec![ResourceRef::external(iri("http://e.com/t"))],
            vec![ResourceRef::Graph {
                graph: TripleGraph::new(),
            }],
            None,
            Provenance::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            BuildError::InvalidResource {
                path: "bodies[0]".into(),
                reason: "graph body must contain at least one triple".into(),
            }
        );
    }
}
