//! Annotation data model, canonical file format, and corpus statistics.

mod bbox;
mod corpus;
mod error;
pub mod io;
mod stats;

pub use bbox::BoundingBox;
pub use corpus::{
    find_exact_duplicates, AnnotatedObject, AnnotationCorpus, CompactionMap, MasterList,
    NamedVrType, VisualRelationship, VrType,
};
pub use error::CorpusError;
pub use io::{load_corpus, save_corpus, CorpusPaths};
pub use stats::{compute_stats, CorpusStats};
