//! Core implementation of an Open Annotation toolkit: a typed annotation
//! model with validation, a selector-resolution engine for anchoring
//! annotations in concrete resources, JSON-LD / Turtle / TriG serialization,
//! a persistent queryable annotation store, and an Annotea legacy bridge.
//!
//! The crate is organized around five subsystems:
//!
//! - [`model`]: the annotation domain types ([`Annotation`], [`ResourceRef`],
//!   [`Selector`], and friends), their invariants, and construction/validation.
//! - [`selector`]: anchoring text selectors in documents, media-fragment
//!   parsing, and SVG area membership tests.
//! - [`serialization`]: the JSON-LD document form, the triple-graph form
//!   (with named graphs for graph bodies), and stable TriG/Turtle output with
//!   a reader for the emitted subset.
//! - [`store`]: an append-only, indexed, durable annotation store with
//!   publish/discover queries.
//! - [`annotea`]: import/export of legacy Annotea records.

pub mod annotea;
pub mod iri;
pub mod model;
pub mod selector;
pub mod serialization;
pub mod store;

pub use annotea::{export_annotea, import_annotea, AnnoteaBody, AnnoteaError, AnnoteaRecord};
pub use iri::{Iri, IriError};
pub use model::{
    new_annotation, specific_target, validate, Agent, Annotation, BuildError, DcmiType,
    EmbeddedContent, Motivation, Provenance, ResourceRef, Selector, SpecificResource, State, Style,
    SvgShape, ValidationReport, Violation,
};
pub use selector::{
    derive_quote, parse_fragment, point_in_area, resolve_text_position, resolve_text_quote,
    AnchoredSpan, DocText, FragmentValue, SelectorError, Span,
};
pub use serialization::graph::{graphs_isomorphic, Literal, Object, Subject, Triple, TripleGraph};
pub use serialization::jsonld::{from_document, to_document, DocumentError};
pub use serialization::trig::{
    parse_trig, parse_turtle, to_graph, write_trig, write_turtle, GraphError, TrigParseError,
};
pub use serialization::vocab::VocabularyConfig;
pub use store::{
    AnnotationStore, QueryFilter, QueryPage, StoreError, StoredAnnotation, MAX_QUERY_LIMIT,
};
