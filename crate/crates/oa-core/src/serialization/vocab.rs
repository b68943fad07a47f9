//! Namespace IRIs and the document-key vocabulary.

use crate::iri::Iri;

pub const OA_NS: &str = "http://www.w3.org/ns/oa#";
pub const CNT_NS: &str = "http://www.w3.org/2011/content#";
pub const DC_NS: &str = "http://purl.org/dc/elements/1.1/";
pub const DCTERMS_NS: &str = "http://purl.org/dc/terms/";
pub const DCTYPES_NS: &str = "http://purl.org/dc/dcmitype/";
pub const FOAF_NS: &str = "http://xmlns.com/foaf/0.1/";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_VALUE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#value";
pub const XSD_DATETIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
pub const XSD_NON_NEGATIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#nonNegativeInteger";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";

/// Default IRI typing embedded graph bodies (the rdfg-1 Graph class).
pub const DEFAULT_GRAPH_TYPE: &str = "http://www.w3.org/2004/03/trix/rdfg-1/Graph";

/// Default JSON-LD @context reference emitted on documents.
pub const DEFAULT_CONTEXT: &str = "http://www.w3.org/ns/oa-context-20130208.json";

/// Expansion table for the document keys: each short key used by the
/// document form, with the IRI it stands for under the default namespaces.
/// Consumers that need full expansion instead of the @context reference can
/// apply this table directly.
pub const TERM_IRIS: &[(&str, &str)] = &[
    ("Annotation", "http://www.w3.org/ns/oa#Annotation"),
    ("hasBody", "http://www.w3.org/ns/oa#hasBody"),
    ("hasTarget", "http://www.w3.org/ns/oa#hasTarget"),
    ("hasSource", "http://www.w3.org/ns/oa#hasSource"),
    ("hasSelector", "http://www.w3.org/ns/oa#hasSelector"),
    ("hasState", "http://www.w3.org/ns/oa#hasState"),
    ("motivatedBy", "http://www.w3.org/ns/oa#motivatedBy"),
    ("annotatedBy", "http://www.w3.org/ns/oa#annotatedBy"),
    ("annotatedAt", "http://www.w3.org/ns/oa#annotatedAt"),
    ("serializedBy", "http://www.w3.org/ns/oa#serializedBy"),
    ("serializedAt", "http://www.w3.org/ns/oa#serializedAt"),
    ("styledBy", "http://www.w3.org/ns/oa#styledBy"),
    ("styleClass", "http://www.w3.org/ns/oa#styleClass"),
    ("Style", "http://www.w3.org/ns/oa#Style"),
    (
        "SpecificResource",
        "http://www.w3.org/ns/oa#SpecificResource",
    ),
    ("SemanticTag", "http://www.w3.org/ns/oa#SemanticTag"),
    (
        "TextPositionSelector",
        "http://www.w3.org/ns/oa#TextPositionSelector",
    ),
    (
        "TextQuoteSelector",
        "http://www.w3.org/ns/oa#TextQuoteSelector",
    ),
    (
        "FragmentSelector",
        "http://www.w3.org/ns/oa#FragmentSelector",
    ),
    ("SvgSelector", "http://www.w3.org/ns/oa#SvgSelector"),
    (
        "HttpRequestState",
        "http://www.w3.org/ns/oa#HttpRequestState",
    ),
    ("TimeState", "http://www.w3.org/ns/oa#TimeState"),
    ("start", "http://www.w3.org/ns/oa#start"),
    ("end", "http://www.w3.org/ns/oa#end"),
    ("exact", "http://www.w3.org/ns/oa#exact"),
    ("prefix", "http://www.w3.org/ns/oa#prefix"),
    ("suffix", "http://www.w3.org/ns/oa#suffix"),
    ("sourceDate", "http://www.w3.org/ns/oa#sourceDate"),
    (
        "ContentAsText",
        "http://www.w3.org/2011/content#ContentAsText",
    ),
    ("chars", "http://www.w3.org/2011/content#chars"),
    ("format", "http://purl.org/dc/elements/1.1/format"),
    ("language", "http://purl.org/dc/elements/1.1/language"),
    ("value", "http://www.w3.org/1999/02/22-rdf-syntax-ns#value"),
    ("conformsTo", "http://purl.org/dc/terms/conformsTo"),
    ("name", "http://xmlns.com/foaf/0.1/name"),
];

/// Namespaces and symbols the serializers are configured with. All three
/// must be absolute IRIs, which the `Iri` type guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyConfig {
    pub oa_ns: Iri,
    pub graph_type_iri: Iri,
    pub context_iri: Iri,
}

impl Default for VocabularyConfig {
    fn default() -> Self {
        VocabularyConfig {
            oa_ns: Iri::new(OA_NS).expect("constant iri"),
            graph_type_iri: Iri::new(DEFAULT_GRAPH_TYPE).expect("constant iri"),
            context_iri: Iri::new(DEFAULT_CONTEXT).expect("constant iri"),
        }
    }
}

impl VocabularyConfig {
    /// IRI of an annotation term under the configured namespace.
    pub fn term(&self, local: &str) -> Iri {
        Iri::new(format!("{}{local}", self.oa_ns)).expect("term under an absolute namespace")
    }
}
