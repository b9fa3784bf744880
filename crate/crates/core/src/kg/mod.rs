//! Knowledge-graph bridge: lowering a corpus to triples under a schema,
//! materializing the deductive closure, and extracting annotations back.
//!
//! Lowered shape, per image (`ns` is the schema namespace):
//!
//! * `img rdf:type ns:Image` and `img ns:hasFilename "file.jpg"`
//! * for each distinct `(class, bbox)` object: `img ns:hasObject obj`,
//!   `obj rdf:type ns:<Class>`, and one integer literal each for
//!   `ns:bboxYmin`, `ns:bboxYmax`, `ns:bboxXmin`, `ns:bboxXmax`
//! * for each relationship: `subj ns:<property> obj`

use std::path::PathBuf;

use thiserror::Error;

mod extract;
mod lower;
mod materialize;
pub mod ntriples;
mod schema;
mod store;

pub use extract::{canonical_order, extract_annotations};
pub use lower::{lower_annotations, lower_image, Vocabulary};
pub use materialize::materialize;
pub use schema::{mangle_class, mangle_property, Axiom, Schema};
pub use store::{GraphStore, Iri, Term, Triple, RDF_TYPE, XSD_INTEGER};

pub const DEFAULT_NAMESPACE: &str = "http://example.org/vrd#";

#[derive(Debug, Error)]
pub enum KgError {
    #[error("schema line {line}: {reason}")]
    MalformedAxiom { line: usize, reason: String },
    #[error("schema line {line}: term {name:?} used before declaration")]
    UndeclaredTerm { line: usize, name: String },
    #[error("schema line {line}: axiom relates {term:?} to itself")]
    SelfAxiom { line: usize, term: String },
    #[error("{kind} {name:?} has no schema designation")]
    UnmappedName { kind: &'static str, name: String },
    #[error("names {first:?} and {second:?} both mangle to {term:?}")]
    ManglingCollision {
        first: String,
        second: String,
        term: String,
    },
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("no unique most specific annotation class for {0}")]
    AmbiguousClass(String),
    #[error("triple file line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("image {0:?} not in corpus")]
    ImageNotFound(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
