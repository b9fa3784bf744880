//! Read-only analysis over a corpus: pattern queries, per-image
//! distributions, quality lint, overlay rendering, and corpus diffs.
//!
//! Nothing in here mutates a corpus.

mod diff;
mod lint;
mod overlay;
mod query;

use thiserror::Error;

pub use diff::{diff_corpora, CorpusDiff, ImageDiff};
pub use lint::{iou, lint, FindingDetail, LintFinding, LintRule, Severity, DEFAULT_NEAR_DUP_IOU};
pub use overlay::{overlay_svg, render_overlay, Selection};
pub use query::{
    distribution, images_with_vr_count, query_images, Histogram, Metric, QueryResult,
    VrCountFilter, VrPattern,
};

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("image {0:?} not found")]
    ImageNotFound(String),
    #[error("relationship index {index} out of range for image {image}")]
    IndexOutOfRange { image: String, index: usize },
    #[error("degenerate bounding box {0}")]
    DegenerateInput(crate::model::BoundingBox),
    #[error("threshold must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
