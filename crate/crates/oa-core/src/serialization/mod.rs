//! Serialization of annotations: JSON-LD documents, RDF triple graphs, and a
//! TriG/Turtle subset for exchange with graph stores.

pub mod graph;
pub mod jsonld;
pub mod trig;
pub mod vocab;
