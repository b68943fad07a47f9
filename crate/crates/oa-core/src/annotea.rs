//! Bridge to the legacy Annotea model.
//!
//! Annotea records arrive and leave as flat JSON objects with the keys
//! `annotates`, `body` (a resource IRI) or `bodyText` (embedded XHTML, the
//! two are mutually exclusive), `context`, `author`, `created`, `modified`,
//! and `subclass`. RDF-level Annotea parsing is out of scope; records reach
//! this module already extracted.
//!
//! XPointer contexts are carried opaquely inside Fragment selectors, never
//! evaluated. Export covers only the Annotea-representable subset and says
//! so (`NotRepresentable`) when an annotation falls outside it.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::Iri;
use crate::model::{
    Agent, Annotation, EmbeddedContent, Motivation, Provenance, ResourceRef, Selector,
    SpecificResource,
};

pub const ANNOTEA_TYPE_NS: &str = "http://www.w3.org/2000/10/annotationType#";
pub const XPOINTER_SCHEME_IRI: &str = "http://www.w3.org/TR/xptr-framework/";

#[derive(Debug, Clone, PartialEq)]
pub enum AnnoteaBody {
    Resource(Iri),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Flat", into = "Flat")]
pub struct AnnoteaRecord {
    pub annotates: Option<Iri>,
    pub body: Option<AnnoteaBody>,
    pub context: Option<String>,
    pub author: Option<String>,
    pub created: Option<DateTime<Utc>>,
    pub modified: Option<DateTime<Utc>>,
    pub subclass: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Flat {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annotates: Option<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    body: Option<Iri>,
    #[serde(rename = "bodyText", default, skip_serializing_if = "Option::is_none")]
    body_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    context: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modified: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subclass: Option<String>,
}

impl From<AnnoteaRecord> for Flat {
    fn from(r: AnnoteaRecord) -> Flat {
        let (body, body_text) = match r.body {
            Some(AnnoteaBody::Resource(iri)) => (Some(iri), None),
            Some(AnnoteaBody::Text(text)) => (None, Some(text)),
            None => (None, None),
        };
        Flat {
            annotates: r.annotates,
            body,
            body_text,
            context: r.context,
            author: r.author,
            created: r.created,
            modified: r.modified,
            subclass: r.subclass,
        }
    }
}

impl TryFrom<Flat> for AnnoteaRecord {
    type Error = String;

    fn try_from(f: Flat) -> Result<AnnoteaRecord, String> {
        let body = match (f.body, f.body_text) {
            (Some(_), Some(_)) => return Err("body and bodyText are mutually exclusive".into()),
            (Some(iri), None) => Some(AnnoteaBody::Resource(iri)),
            (None, Some(text)) => Some(AnnoteaBody::Text(text)),
            (None, None) => None,
        };
        Ok(AnnoteaRecord {
            annotates: f.annotates,
            body,
            context: f.context,
            author: f.author,
            created: f.created,
            modified: f.modified,
            subclass: f.subclass,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnoteaError {
    #[error("record has no annotates resource")]
    MissingAnnotates,
    #[error("record has no body")]
    MissingBody,
    #[error("annotation has no annotea form: {0}")]
    NotRepresentable(String),
}

fn encode_label(label: &str) -> String {
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

fn decode_label(encoded: &str) -> String {
    let bytes = encoded.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            if let Ok(b) = u8::from_str_radix(&encoded[i + 1..i + 3], 16) {
                out.push(b);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8(out).unwrap_or_else(|_| encoded.to_string())
}

fn subclass_motivation(label: &str) -> Motivation {
    match label {
        "Question" => Motivation::Questioning,
        "Comment" => Motivation::Commenting,
        other => {
            let iri = Iri::new(format!("{ANNOTEA_TYPE_NS}{}", encode_label(other)))
                .expect("encoded label under the annotea namespace");
            Motivation::Extension(iri)
        }
    }
}

fn motivation_subclass(m: &Motivation) -> Result<String, AnnoteaError> {
    match m {
        Motivation::Questioning => Ok("Question".to_string()),
        Motivation::Commenting => Ok("Comment".to_string()),
        Motivation::Extension(iri) => match iri.as_str().strip_prefix(ANNOTEA_TYPE_NS) {
            Some(suffix) => Ok(decode_label(suffix)),
            None => Err(AnnoteaError::NotRepresentable(format!(
                "motivation {iri} is outside the annotea type namespace"
            ))),
        },
        other => Err(AnnoteaError::NotRepresentable(format!(
            "motivation {} has no annotea subclass",
            other.name().unwrap_or("unknown")
        ))),
    }
}

/// Lifts a legacy record into the annotation model. The context, when
/// present, becomes a Fragment selector conforming to the XPointer
/// framework; an embedded body is tagged `application/xhtml+xml`.
pub fn import_annotea(r: &AnnoteaRecord) -> Result<Annotation, AnnoteaError> {
    let annotates = r.annotates.clone().ok_or(AnnoteaError::MissingAnnotates)?;
    let body = r.body.as_ref().ok_or(AnnoteaError::MissingBody)?;

    let target = match &r.context {
        Some(context) => ResourceRef::Specific {
            spec: SpecificResource {
                source: annotates,
                selector: Some(Selector::Fragment {
                    value: context.clone(),
                    conforms_to: Some(Iri::new(XPOINTER_SCHEME_IRI).expect("xpointer scheme iri")),
                }),
                state: None,
                style_class: None,
            },
            dcmi: None,
        },
        None => ResourceRef::external(annotates),
    };

    let body = match body {
        AnnoteaBody::Resource(iri) => ResourceRef::external(iri.clone()),
        AnnoteaBody::Text(text) => ResourceRef::Embedded {
            content: EmbeddedContent::text(text.clone()).with_media_type("application/xhtml+xml"),
            dcmi: None,
        },
    };

    Ok(Annotation {
        id: None,
        bodies: vec![body],
        targets: vec![target],
        motivation: r.subclass.as_deref().map(subclass_motivation),
        provenance: Provenance {
            annotated_by: r.author.clone().map(Agent::named),
            annotated_at: r.created,
            serialized_by: None,
            serialized_at: r.modified,
        },
        style: None,
        extensions: serde_json::Map::new(),
    })
}

/// Lowers an annotation back to a legacy record. Fields Annotea never had
/// (resource classes, agent ids alongside names, styles, the serializing
/// agent) are dropped; structure Annotea cannot express at all is refused.
pub fn export_annotea(a: &Annotation) -> Result<AnnoteaRecord, AnnoteaError> {
    let [target] = a.targets.as_slice() else {
        return Err(AnnoteaError::NotRepresentable(
            "annotea carries exactly one annotated resource".into(),
        ));
    };
    let (annotates, context) = match target {
        ResourceRef::External { iri, .. } => (iri.clone(), None),
        ResourceRef::Specific { spec, .. } => {
            let context = match &spec.selector {
                Some(Selector::Fragment { value, .. }) => Some(value.clone()),
                Some(_) => {
                    return Err(AnnoteaError::NotRepresentable(
                        "annotea contexts are fragment expressions".into(),
                    ))
                }
                None => None,
            };
            (spec.source.clone(), context)
        }
        _ => {
            return Err(AnnoteaError::NotRepresentable(
                "annotea annotates a web resource".into(),
            ))
        }
    };

    let body = match a.bodies.as_slice() {
        [] => {
            return Err(AnnoteaError::NotRepresentable(
                "annotea annotations always carry a body".into(),
            ))
        }
        [ResourceRef::External { iri, .. }] => AnnoteaBody::Resource(iri.clone()),
        [ResourceRef::Embedded { content, .. }] => AnnoteaBody::Text(content.text.clone()),
        [_] => {
            return Err(AnnoteaError::NotRepresentable(
                "annotea bodies are resources or embedded text".into(),
            ))
        }
        _ => {
            return Err(AnnoteaError::NotRepresentable(
                "annotea carries at most one body".into(),
            ))
        }
    };

    let subclass = a.motivation.as_ref().map(motivation_subclass).transpose()?;
    let author = a.provenance.annotated_by.as_ref().and_then(|agent| {
        agent
            .name
            .clone()
            .or_else(|| agent.id.as_ref().map(|id| id.to_string()))
    });

    Ok(AnnoteaRecord {
        annotates: Some(annotates),
        body: Some(body),
        context,
        author,
        created: a.provenance.annotated_at,
        modified: a.provenance.serialized_at,
        subclass,
    })
}
